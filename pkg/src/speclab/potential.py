"""Potentials of the family -Delta + |xy|^p - lambda*(x^2+y^2)^(p/(p+2)).

The pair (p, lambda) lives here and nowhere else; everything downstream
receives a :class:`PotentialParams`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PotentialParams", "potential_1d", "potential_2d"]


@dataclass(frozen=True)
class PotentialParams:
    """Exponent p >= 1 and coupling lambda >= 0 of the 2D family."""

    p: float
    lam: float
    # 2p/(p+2), precomputed once; exponent of the negative radial term.
    radial_exponent: float = field(init=False)

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"exponent p must be >= 1, got {self.p}")
        if not self.lam >= 0:
            raise ValueError(f"coupling lambda must be >= 0, got {self.lam}")
        object.__setattr__(self, "radial_exponent", 2.0 * self.p / (self.p + 2.0))


def _abs_pow(base, p):
    """|base|^p as exp(p*ln|base|), with an exact 0 at base = 0.

    Avoids pow-of-negative pitfalls for non-integer p.
    """
    base = np.asarray(base, dtype=float)
    # log(0) = -inf and exp(p * -inf) = 0, which is the exact limit value.
    with np.errstate(divide="ignore"):
        return np.exp(p * np.log(np.abs(base)))


def potential_1d(t, p: float):
    """|t|^p, the 1D anharmonic well. Scalar or array argument."""
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    res = _abs_pow(t, p)
    return float(res) if np.isscalar(t) else res


def potential_2d(x, y, params: PotentialParams):
    """|xy|^p - lambda*(x^2+y^2)^(p/(p+2)) at (x, y). Scalar or array."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    well = _abs_pow(x * y, params.p)
    r2 = x * x + y * y
    res = well - params.lam * _abs_pow(np.sqrt(r2), params.radial_exponent)
    return float(res) if res.ndim == 0 else res
