"""Compare the numba and pure-numpy backends of the capped simulation kernel.

Two measurements:

* kernel: ``close`` on random frontiers, both backends in one process;
* end to end: ``evaluate_word`` on long words, once per backend in a fresh
  interpreter (the backend is fixed at import time by COSTREACH_NO_NUMBA).

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from costreach import _kernels as K
from costreach.monoid import NA

END_TO_END = r"""
import random, time
from costreach import costautomata as ca, _kernels as K
A = ca.b_max(ca.block_counter(), ca.block_counter(count="b", reset="a"))
rng = random.Random(0)
words = [tuple(rng.choice("ab") for _ in range(400)) for _ in range(20)]
ca.evaluate_word(A, words[0][:10])  # warm-up / compile
t = time.perf_counter()
vals = [ca.evaluate_word(A, w) for w in words]
print(K.backend(), time.perf_counter() - t, sum(vals))
"""


def problem(rng, states=40, trans=400, counters=2, k=12):
    profiles = [
        ((1, NA, NA), (0, NA, NA)),
        ((0, NA, 0), (1, NA, NA)),
        ((0, NA, NA), (0, NA, NA)),
        ((2, NA, 1), (0, NA, 0)),
    ]
    maps = K.profile_maps(profiles, counters, k)
    src = rng.integers(0, states, trans).astype(np.int64)
    dst = rng.integers(0, states, trans).astype(np.int64)
    pid = rng.integers(0, len(profiles), trans).astype(np.int64)
    F = np.zeros((states, maps.shape[1]), dtype=bool)
    F[0, 0] = True
    return F, src, dst, pid, maps


def timeit(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(1)
    prob = problem(rng)
    t_np, ref = timeit(K._close_numpy, prob, args.repeat)
    print(f"kernel close, numpy : {t_np * 1e3:9.2f} ms")
    if hasattr(K, "_close_numba"):
        K._close_numba(*problem(np.random.default_rng(2), states=3, trans=4))  # compile
        t_nb, out = timeit(K._close_numba, prob, args.repeat)
        assert np.array_equal(out, ref), "backends disagree"
        print(f"kernel close, numba : {t_nb * 1e3:9.2f} ms  (x{t_np / t_nb:.1f})")
    else:
        print("kernel close, numba : unavailable (COSTREACH_NO_NUMBA set or numba missing)")

    results = {}
    for flag in ("", "1"):
        env = dict(os.environ, COSTREACH_NO_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        name, secs, total = out.stdout.split()
        results[name] = (float(secs), total)
        print(f"evaluate_word x20, {name:5s}: {float(secs):7.3f} s  (checksum {total})")
    if len({v[1] for v in results.values()}) != 1:
        print("warning: backends produced different values", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
