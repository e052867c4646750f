from __future__ import annotations

import numpy as np

from costreach import _kernels as K
from costreach.monoid import NA


def _random_problem(rng, states=5, trans=14, counters=2, k=3):
    profiles = [((1, NA, NA), (0, NA, NA)), ((0, NA, 0), (1, NA, NA)), ((0, NA, NA), (0, NA, NA)), ((2, NA, 1), (0, NA, 0))]
    maps = K.profile_maps(profiles, counters, k)
    src = rng.integers(0, states, trans).astype(np.int64)
    dst = rng.integers(0, states, trans).astype(np.int64)
    pid = rng.integers(0, len(profiles), trans).astype(np.int64)
    F = rng.random((states, maps.shape[1])) < 0.2
    return F, src, dst, pid, maps


def test_profile_maps_semantics():
    maps = K.profile_maps([((1, NA, NA),), ((0, NA, 0),), ((1, 3, 0),)], 1, 2)
    assert maps[0].tolist() == [1, 2, -1]
    assert maps[1].tolist() == [0, 0, 0]
    assert maps[2].tolist() == [-1, -1, -1]  # mid block of 3 exceeds k


def test_numpy_and_compiled_backends_agree():
    rng = np.random.default_rng(0)
    for _ in range(30):
        F, src, dst, pid, maps = _random_problem(rng)
        a = K._step_numpy(F, src, dst, pid, maps)
        b = K.step(F, src, dst, pid, maps)
        assert np.array_equal(a, b)
        c = K._close_numpy(F, src, dst, pid, maps)
        d = K.close(F, src, dst, pid, maps)
        assert np.array_equal(c, d)
        assert (c | F).sum() == c.sum()


def test_backend_name():
    assert K.backend() in ("numba", "numpy")
