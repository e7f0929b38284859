"""Compiled pair loops for the quadratic checkers.

Each kernel returns one (margin, partner index) per row so the caller can
reduce rows in index order; within a row the first minimizer wins.
"""

from __future__ import annotations

import math
import os

import numba
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the portable layer; avoids probing an outdated system TBB
    numba.config.THREADING_LAYER = "workqueue"


@numba.njit(cache=True, parallel=True)
def cone_rows(P, Q, lam, lo, hi):
    """Row ``i`` in ``[lo, hi)``: min over ``j < i`` of
    ``lam - <Q[i], P[j] - P[i]> / ||P[j] - P[i]||``.

    A coincident pair is reported with partner ``-(j + 1)``.
    """
    n = hi - lo
    d = P.shape[1]
    best = np.full(n, np.inf)
    arg = np.full(n, -1, dtype=np.int64)
    for r in numba.prange(n):
        i = lo + r
        b = np.inf
        a = -1
        for j in range(i):
            s2 = 0.0
            dot = 0.0
            for k in range(d):
                v = P[j, k] - P[i, k]
                s2 += v * v
                dot += v * Q[i, k]
            if s2 == 0.0:
                a = -(j + 1)
                break
            m = lam - dot / math.sqrt(s2)
            if m < b:
                b = m
                a = j
        best[r] = b
        arg[r] = a
    return best, arg
