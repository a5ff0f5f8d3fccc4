"""Compiled inner loops for tensor applies and reductions.

All loops run sequentially in a fixed order, so results are bitwise
reproducible. Sums are blocked (fixed 4096-element blocks, then a sum of
block totals) to keep rounding error close to pairwise summation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BLOCK = 4096


@njit(cache=True)
def tensor_gather(X, inv_a, wa, inv_b, wb_gathered, n_identity, Y):
    """Y[r, c] = n_identity X[r, c] + sum_t wa[t, i] wb[t, j] X[i, j], i = inv_a[t, r], j = inv_b[t, c].

    ``wb_gathered[t, c]`` is ``wb[t, inv_b[t, c]]``.
    """
    d1, d2 = X.shape
    T = inv_a.shape[0]
    for r in range(d1):
        for c in range(d2):
            Y[r, c] = n_identity * X[r, c]
        for t in range(T):
            i = inv_a[t, r]
            w = wa[t, i]
            for c in range(d2):
                Y[r, c] += w * wb_gathered[t, c] * X[i, inv_b[t, c]]


@njit(cache=True)
def sq_norm(x):
    n = x.shape[0]
    total = 0.0
    for start in range(0, n, BLOCK):
        part = 0.0
        for i in range(start, min(start + BLOCK, n)):
            part += x[i].real * x[i].real + x[i].imag * x[i].imag
        total += part
    return total


@njit(cache=True)
def cdot(x, y):
    """sum conj(x) * y."""
    n = x.shape[0]
    total = 0j
    for start in range(0, n, BLOCK):
        part = 0j
        for i in range(start, min(start + BLOCK, n)):
            part += np.conj(x[i]) * y[i]
        total += part
    return total


def as_flat(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.complex128).reshape(-1)


@njit(cache=True)
def axpy(a, x, y):
    """y += a x in place."""
    for i in range(x.shape[0]):
        y[i] += a * x[i]


@njit(cache=True)
def scale(x, a):
    """x *= a in place."""
    for i in range(x.shape[0]):
        x[i] *= a
