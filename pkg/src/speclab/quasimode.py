"""Weyl-sequence trial states and their residuals.

A trial state at scale k is

    psi_k(x, y) = k^{-1/(p+2)} h_p(x y^{p/(p+2)}) e^{i phase(y)} chi(y/k)

with the oscillator ground state h_p, a fixed smooth bump chi supported in
[1, 2] with unit L^2 mass, and a y-dependent phase: in the supercritical
regime the WKB phase accumulated from the classical turning point, in the
critical regime sqrt(mu)*y. The residual ||(L - mu) psi_k|| is evaluated
analytically term by term and integrated by tensor Simpson quadrature in
the variables (t, y) with t = x y^{p/(p+2)}.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .oscillator1d import OscillatorSolution, default_oscillator, gamma
from .potential import PotentialParams

__all__ = [
    "PhaseKind",
    "QuasimodeSpec",
    "bump",
    "bump_prime",
    "bump_second",
    "quasimode_residual",
    "QuadratureError",
]


class QuadratureError(RuntimeError):
    """Raised when the tensor quadrature fails to stabilize."""


class PhaseKind(enum.Enum):
    SUPERCRITICAL = "supercritical"
    CRITICAL = "critical"


def _bump_norm_constant() -> float:
    val, _ = quad(lambda s: math.exp(-2.0 / (1.0 - s * s)), -1.0, 1.0,
                  epsabs=1e-14, epsrel=1e-13)
    return math.sqrt(2.0 / val)


_BUMP_C = _bump_norm_constant()


def _template(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


def bump(u) -> np.ndarray:
    """chi(u): smooth, supported in [1, 2], with integral of chi^2 equal 1."""
    u = np.asarray(u, dtype=float)
    return _BUMP_C * _template(2.0 * u - 3.0)


def bump_prime(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    s = 2.0 * u - 3.0
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    d = 1.0 - si * si
    out[inside] = np.exp(-1.0 / d) * (-2.0 * si / d**2)
    return 2.0 * _BUMP_C * out


def bump_second(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    s = 2.0 * u - 3.0
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    d = 1.0 - si * si
    out[inside] = np.exp(-1.0 / d) * (
        4.0 * si * si / d**4 - 2.0 * (1.0 + 3.0 * si * si) / d**3
    )
    return 4.0 * _BUMP_C * out


@dataclass
class QuasimodeSpec:
    """All ingredients of one Weyl-sequence element."""

    params: PotentialParams
    mu: float
    k: float
    beta: float
    phasekind: PhaseKind
    oscillator: OscillatorSolution

    def __post_init__(self):
        p = self.params.p
        gam = self.oscillator.gamma
        if self.phasekind is PhaseKind.SUPERCRITICAL:
            if not self.params.lam > gam:
                raise ValueError(
                    f"supercritical spec needs lambda > gamma_p, got "
                    f"lambda={self.params.lam}, gamma_p={gam}"
                )
            expected = (p + 2.0) / (2.0 * p + 2.0) * math.sqrt(self.params.lam - gam)
            if abs(self.beta - expected) > 1e-9 * max(1.0, expected):
                raise ValueError("beta inconsistent with lambda - gamma_p")
        else:
            if abs(self.params.lam - gam) > 1e-9 * max(1.0, gam):
                raise ValueError("critical spec needs lambda = gamma_p")
            if self.mu < 0:
                raise ValueError("critical spec needs mu >= 0")
            if self.beta != 0.0:
                raise ValueError("critical spec has beta = 0")
        if not self.k > 0:
            raise ValueError("scale k must be positive")

    @classmethod
    def supercritical(
        cls,
        params: PotentialParams,
        mu: float,
        k: float,
        oscillator: OscillatorSolution | None = None,
    ) -> "QuasimodeSpec":
        osc = oscillator if oscillator is not None else default_oscillator(params.p)
        beta = (params.p + 2.0) / (2.0 * params.p + 2.0) * math.sqrt(
            params.lam - osc.gamma
        )
        return cls(params, mu, k, beta, PhaseKind.SUPERCRITICAL, osc)

    @classmethod
    def critical(
        cls,
        p: float,
        mu: float,
        k: float,
        oscillator: OscillatorSolution | None = None,
    ) -> "QuasimodeSpec":
        osc = oscillator if oscillator is not None else default_oscillator(p)
        params = PotentialParams(p=p, lam=osc.gamma)
        return cls(params, mu, k, 0.0, PhaseKind.CRITICAL, osc)

    def phase_lower_limit(self) -> float:
        """Turning point y_0 where the WKB integrand first turns real."""
        if self.phasekind is PhaseKind.CRITICAL or self.mu == 0.0:
            return 0.0
        p = self.params.p
        return (
            abs(self.mu) ** ((p + 2.0) / (2.0 * p))
            * (p + 2.0) ** ((p + 2.0) / p)
            / ((2.0 * p + 2.0) ** ((p + 2.0) / p) * self.beta ** ((p + 2.0) / p))
        )


def _phase_derivatives(spec: QuasimodeSpec, y: np.ndarray):
    """phase(y), phase'(y), phase''(y) on the quadrature nodes."""
    p = spec.params.p
    a = p / (p + 2.0)
    if spec.phasekind is PhaseKind.CRITICAL:
        root = math.sqrt(spec.mu)
        return root * y, np.full_like(y, root), np.zeros_like(y)
    c2 = ((2.0 * p + 2.0) * spec.beta / (p + 2.0)) ** 2
    dphi = np.sqrt(c2 * y ** (2.0 * a) + spec.mu)
    ddphi = a * c2 * y ** (2.0 * a - 1.0) / dphi
    # accumulate the phase itself by adaptive quadrature between nodes
    integrand = lambda t: math.sqrt(c2 * t ** (2.0 * a) + spec.mu)
    y0 = spec.phase_lower_limit()
    phi = np.empty_like(y)
    acc, _ = quad(integrand, y0, float(y[0]), limit=200)
    phi[0] = acc
    for i in range(1, y.size):
        seg, _ = quad(integrand, float(y[i - 1]), float(y[i]), limit=200)
        acc += seg
        phi[i] = acc
    return phi, dphi, ddphi


def _t_cutoff(osc: OscillatorSolution) -> float:
    """Smallest sampled t beyond which |h_p| stays under 1e-9."""
    t = np.linspace(0.0, osc.halflength, osc.meshcount + 1)
    big = np.abs(osc.hvalues) >= 1e-9
    if not big.any():
        return osc.halflength
    idx = np.nonzero(big)[0][-1]
    return float(min(t[min(idx + 1, osc.meshcount)] + osc.spacing, osc.halflength))


def _simpson_weights(n: int, h: float) -> np.ndarray:
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def _evaluate(spec: QuasimodeSpec, nt: int, ny: int) -> tuple[float, float]:
    """(||psi||^2, ||(L - mu) psi||^2) on an nt x ny Simpson grid."""
    p = spec.params.p
    lam = spec.params.lam
    mu = spec.mu
    k = spec.k
    osc = spec.oscillator
    gam = osc.gamma
    a = p / (p + 2.0)
    pref2 = k ** (-2.0 / (p + 2.0))

    T = _t_cutoff(osc)
    t = np.linspace(-T, T, nt)
    y = np.linspace(k, 2.0 * k, ny)
    wt = _simpson_weights(nt, t[1] - t[0])
    wy = _simpson_weights(ny, y[1] - y[0])

    H = osc.h(t)
    Hp = osc.h_prime(t)
    Hpp = osc.h_second(t)
    abst_p = np.abs(t) ** p

    phi, dphi, ddphi = _phase_derivatives(spec, y)
    u = y / k
    X = bump(u)
    X1 = bump_prime(u) / k
    X2 = bump_second(u) / k**2

    norm2 = 0.0
    resid2 = 0.0
    # chunk over y to bound memory on fine grids
    chunk = max(1, int(2_000_000 // nt))
    for lo in range(0, ny, chunk):
        sl = slice(lo, min(lo + chunk, ny))
        yc = y[sl][None, :]
        Xc = X[sl][None, :]
        X1c = X1[sl][None, :]
        X2c = X2[sl][None, :]
        dpc = dphi[sl][None, :]
        ddpc = ddphi[sl][None, :]
        wyc = wy[sl][None, :]

        y2a = yc ** (2.0 * a)
        tcol = t[:, None]
        Hc = H[:, None]
        Hpc = Hp[:, None]
        Hppc = Hpp[:, None]

        # chain-rule pieces for d/dy through t = x*y^a at fixed x
        g = a * tcol / yc
        g_y = a * (a - 1.0) * tcol / yc**2

        xx = tcol * yc ** (-a)
        V = abst_p[:, None] * y2a - lam * (xx * xx + yc * yc) ** a

        psi_xx = y2a * Hppc * Xc
        re_yy = (Hppc * g * g + Hpc * g_y) * Xc - Hc * dpc * dpc * Xc \
            + Hc * X2c + 2.0 * Hpc * g * X1c
        im_yy = Hc * ddpc * Xc + 2.0 * Hpc * g * dpc * Xc + 2.0 * Hc * dpc * X1c

        re_F = -psi_xx - re_yy + (V - mu) * Hc * Xc
        im_F = -im_yy

        jac = yc ** (-a)
        w2 = wt[:, None] * wyc * jac
        norm2 += float(np.sum(w2 * (Hc * Xc) ** 2))
        resid2 += float(np.sum(w2 * (re_F * re_F + im_F * im_F)))
    # the common unit-modulus factor e^{i phi} does not change the norms;
    # phi is still accumulated above so psi itself is fully specified
    del phi
    return pref2 * norm2, pref2 * resid2


def quasimode_residual(spec: QuasimodeSpec) -> tuple[float, float, float]:
    """(||psi_k||, ||(L - mu) psi_k||, their ratio), quadrature-stabilized.

    Tensor Simpson with factor-2 refinement until both norms move by less
    than 1e-3 relative; raises QuadratureError otherwise.
    """
    nt, ny = 257, 129
    prev = _evaluate(spec, nt, ny)
    for _ in range(5):
        nt = 2 * nt - 1
        ny = 2 * ny - 1
        cur = _evaluate(spec, nt, ny)
        dn = abs(cur[0] - prev[0]) / max(cur[0], 1e-300)
        dr = abs(cur[1] - prev[1]) / max(cur[1], 1e-300)
        if dn < 1e-3 and dr < 1e-3:
            norm = math.sqrt(cur[0])
            resid = math.sqrt(cur[1])
            return norm, resid, resid / norm
        prev = cur
    raise QuadratureError(
        "quasimode quadrature did not stabilize to 1e-3 on refinement"
    )
