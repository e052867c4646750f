"""Capped counter simulation kernels.

A frontier is a boolean array ``F[state, valuation]`` where valuations are
counter vectors with entries ``0..k`` packed in mixed radix ``k + 1``.  Each
transition carries a profile id; ``maps[pid, v]`` is the valuation after
applying that profile to ``v`` (``-1`` when some checked value exceeds ``k``).

Set ``COSTREACH_NO_NUMBA=1`` to force the pure-numpy path.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("COSTREACH_NO_NUMBA", "") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def profile_maps(profiles, counters: int, k: int) -> np.ndarray:
    """Valuation transition table, one row per profile vector."""
    radix = k + 1
    nval = radix**counters
    digits = np.zeros((nval, counters), dtype=np.int64)
    v = np.arange(nval)
    for c in range(counters):
        digits[:, c] = v % radix
        v = v // radix
    maps = np.full((len(profiles), nval), -1, dtype=np.int32)
    weights = radix ** np.arange(counters)
    for pid, vec in enumerate(profiles):
        ok = np.ones(nval, dtype=bool)
        new = np.zeros((nval, counters), dtype=np.int64)
        for c, (left, mid, right) in enumerate(vec):
            x = digits[:, c] + left
            ok &= x <= k
            if right is None:
                new[:, c] = x
            else:
                if (mid is not None and mid > k) or right > k:
                    ok[:] = False
                new[:, c] = right
        idx = (new * weights).sum(axis=1)
        maps[pid, ok] = idx[ok]
    return maps


def _step_numpy(frontier, src, dst, pid, maps):
    out = np.zeros_like(frontier)
    if len(src) == 0:
        return out
    t_idx, vals = np.nonzero(frontier[src])
    if len(t_idx) == 0:
        return out
    nv = maps[pid[t_idx], vals]
    ok = nv >= 0
    out[dst[t_idx[ok]], nv[ok]] = True
    return out


def _close_numpy(frontier, src, dst, pid, maps):
    cur = frontier.copy()
    while True:
        nxt = cur | _step_numpy(cur, src, dst, pid, maps)
        if np.array_equal(nxt, cur):
            return cur
        cur = nxt


if USE_NUMBA:

    @njit(cache=True)
    def _step_numba(frontier, src, dst, pid, maps):
        out = np.zeros_like(frontier)
        nval = frontier.shape[1]
        for t in range(src.shape[0]):
            s = src[t]
            d = dst[t]
            p = pid[t]
            for v in range(nval):
                if frontier[s, v]:
                    w = maps[p, v]
                    if w >= 0:
                        out[d, w] = True
        return out

    @njit(cache=True)
    def _close_numba(frontier, src, dst, pid, maps):
        cur = frontier.copy()
        nval = cur.shape[1]
        changed = True
        while changed:
            changed = False
            for t in range(src.shape[0]):
                s = src[t]
                d = dst[t]
                p = pid[t]
                for v in range(nval):
                    if cur[s, v]:
                        w = maps[p, v]
                        if w >= 0 and not cur[d, w]:
                            cur[d, w] = True
                            changed = True
        return cur

    step = _step_numba
    close = _close_numba
else:
    step = _step_numpy
    close = _close_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
