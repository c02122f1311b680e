"""Compiled inner loops: Sturm counts and the seeded LCG block fill."""
from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["sturm_count", "lcg_uniform"]

_LCG_MULT = np.uint64(6364136223846793005)
_LCG_INC = np.uint64(1442695040888963407)


@njit(cache=True)
def _sturm_count(diag, off, theta):
    n = diag.shape[0]
    count = 0
    q = diag[0] - theta
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = -1e-300
        q = (diag[i] - theta) - off[i - 1] * off[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def sturm_count(diag: np.ndarray, off: np.ndarray, theta: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below theta."""
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    if off.shape[0] != diag.shape[0] - 1:
        raise ValueError("offdiag must have length len(diag) - 1")
    return int(_sturm_count(diag, off, float(theta)))


@njit(cache=True)
def _lcg_fill(out, seed):
    state = np.uint64(seed)
    for i in range(out.shape[0]):
        state = state * _LCG_MULT + _LCG_INC
        out[i] = np.float64(state >> np.uint64(11)) / 9007199254740992.0
    return out


def lcg_uniform(count: int, seed: int) -> np.ndarray:
    """count uniforms in [0, 1) from the in-repo 64-bit LCG.

    state <- state*6364136223846793005 + 1442695040888963407 (mod 2^64),
    top 53 bits mapped to the unit interval. Cross-language reproducible.
    """
    out = np.empty(count, dtype=np.float64)
    return _lcg_fill(out, np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
