"""Quantitative program: cutoff scans, DN bracketing, the critical
positivity boundary, quasimode residuals, and eigenvalue-moment reports.

Scan points are independent jobs run on a thread pool whose width is
capped by the SPECLAB_THREADS environment variable; results are always
collected in input order.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .discretize2d import (
    BoundaryKind,
    Grid2D,
    SparseSymmetric,
    assemble_2d,
    build_grid,
    embed_full,
)
from .eigensolve import SpectrumResult, lobpcg, random_block
from .oscillator1d import gamma
from .potential import PotentialParams
from .quasimode import (  # noqa: F401  (re-exported experiment surface)
    PhaseKind,
    QuadratureError,
    QuasimodeSpec,
    quasimode_residual,
)

__all__ = [
    "ScanRow",
    "CriticalScan",
    "MomentReport",
    "CriticalLambdaResult",
    "EigenfunctionGrid",
    "cutoff_scan",
    "dn_bracket",
    "ground_energy_even",
    "critical_lambda",
    "critical_surface",
    "meeting_interval",
    "moment_sum",
    "export_eigenfunction",
    "solve_operator",
    "QuasimodeSpec",
    "quasimode_residual",
]

_MOMENT_COUNT_CAP = 5000


def _max_workers() -> int:
    raw = os.environ.get("SPECLAB_THREADS")
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("SPECLAB_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _map_ordered(fn, items):
    workers = min(_max_workers(), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _npts_for(R: float, spacing: float) -> int:
    return 2 * max(4, round(R / spacing)) + 1


def _prolong(coarse: np.ndarray, grid_c: Grid2D, grid_f: Grid2D,
             bc: BoundaryKind) -> np.ndarray:
    """Bilinear interpolation of a coarse solution block onto the fine grid."""
    from scipy.interpolate import RegularGridInterpolator

    cols = []
    ax_c = grid_c.axis()
    ax_f = grid_f.axis()
    xf, yf = np.meshgrid(ax_f, ax_f, indexing="ij")
    pts = np.column_stack([xf.ravel(), yf.ravel()])
    for j in range(coarse.shape[1]):
        full = embed_full(grid_c, bc, coarse[:, j])
        interp = RegularGridInterpolator((ax_c, ax_c), full, method="linear")
        fine = interp(pts).reshape(grid_f.npts, grid_f.npts)
        if bc is BoundaryKind.DIRICHLET:
            cols.append(fine[1:-1, 1:-1].ravel())
        else:
            cols.append(fine.ravel())
    return np.column_stack(cols)


def solve_operator(
    params: PotentialParams,
    R: float,
    spacing: float,
    bc: BoundaryKind,
    count: int,
    tol: float = 1e-8,
    seed: int = 42,
    maxit: int = 3000,
    x0: Optional[np.ndarray] = None,
) -> SpectrumResult:
    """Assemble and solve the truncated operator, nested-grid accelerated.

    When the lattice admits a factor-2 coarsening (npts = 1 mod 4) the
    initial block is prolonged from a recursive coarse solve, which keeps
    the Jacobi-preconditioned iteration count low on fine grids.
    """
    npts = _npts_for(R, spacing)
    return _solve_npts(params, R, npts, bc, count, tol, seed, maxit, x0)


# Above this dimension plain Jacobi preconditioning stalls (iteration
# counts grow like 1/h); switch to a shifted incomplete-LU preconditioner.
_ILU_DIM_THRESHOLD = 10_000

# maximum spacing halvings per point of the critical surface; spacing/16
# resolves the channel walls for p up to ~16 at R = 20 (see critical_surface)
_MAX_REFINE = 4


def _ilu_precond(csr, shift: float):
    """Preconditioner block -> (A + shift I)^{-1} block via incomplete LU."""
    import scipy.sparse as sp
    from scipy.sparse.linalg import spilu

    csc = (csr + shift * sp.eye(csr.shape[0], format="csr")).tocsc()
    if csr.shape[0] > 2_000_000:
        # fill cap keeps the factor inside a few GB on the finest grids
        ilu = spilu(csc, drop_tol=1e-3, fill_factor=5.0)
    else:
        ilu = spilu(csc, drop_tol=1e-4, fill_factor=10.0)
    return lambda block: ilu.solve(block)


# Node-deleted even-sector matrices up to this dimension get an exact
# sparse LU preconditioner: on the finest steep-p lattices the prolonged
# start block is poor (linear interpolation of razor-thin channel profiles
# carries huge gradient energy) and incomplete factorizations then crawl,
# while the thin cross-shaped domain factorizes exactly in seconds.
_DIRECT_DIM_MAX = 600_000


def _direct_precond(csr, shift: float):
    """Preconditioner block -> (A + shift I)^{-1} block via exact sparse LU."""
    import scipy.sparse as sp
    from scipy.sparse.linalg import splu

    csc = (csr + shift * sp.eye(csr.shape[0], format="csr")).tocsc()
    lu = splu(csc)
    return lambda block: lu.solve(block)


def _solve_npts(params, R, npts, bc, count, tol, seed, maxit, x0):
    grid = build_grid(R, npts)
    csr = assemble_2d(grid, params, bc).to_csr()
    if x0 is None and npts > 101 and (npts - 1) % 4 == 0:
        coarse_npts = (npts - 1) // 2 + 1
        coarse = _solve_npts(
            params, R, coarse_npts, bc, count, max(tol, 1e-6), seed, maxit, None
        )
        if coarse.eigenvectors is not None:
            grid_c = build_grid(R, coarse_npts)
            x0 = _prolong(coarse.eigenvectors, grid_c, grid, bc)
    precond = None
    if csr.shape[0] >= _ILU_DIM_THRESHOLD:
        shift = 1.0
        if x0 is not None and x0.shape[1] > 0:
            # Rayleigh estimate of E_1 from the start block sets the shift
            # so A + shift I stays safely positive.
            q = x0[:, 0]
            e1 = float(q @ (csr @ q)) / float(q @ q)
            shift = 1.0 + max(0.0, -e1)
        precond = _ilu_precond(csr, shift)
    # with a healthy ILU shift the iteration converges in well under 200
    # steps; running longer only burns time before the retry below
    first_maxit = min(maxit, 200) if precond is not None else maxit
    res = lobpcg(csr, count, tol, maxit=first_maxit, seed=seed, x0=x0,
                 precond=precond)
    if not res.converged and precond is not None:
        # a stale shift estimate leaves A + shift I indefinite and the
        # iteration stalls; the stalled Ritz value is already an accurate
        # E_1 estimate, so rebuild the factor around it and retry warm
        shift = 1.0 + max(0.0, -float(res.eigenvalues[0])) * 1.05
        precond = _ilu_precond(csr, shift)
        res = lobpcg(csr, count, tol, maxit=maxit, seed=seed,
                     x0=res.eigenvectors, precond=precond)
    return res


def _assemble_even_sector(
    params: PotentialParams,
    R: float,
    m: int,
    bc: BoundaryKind = BoundaryKind.DIRICHLET,
):
    """Even-even symmetry block on the quarter lattice, capped nodes deleted.

    Nodes x_i = i*h with h = R/m; i = 0..m-1 for Dirichlet (the wall node
    at x = R is eliminated) and i = 0..m for Neumann (the wall node stays,
    with the half-weighted stiffness row of the full Neumann assembly).
    Reflection symmetry across each axis is imposed by a mirror
    ghost node, symmetrized with a diagonal similarity that turns the
    first off-diagonal coupling into -sqrt(2)/h^2 (identical to the 1D
    oscillator half-line reduction). The result is exactly similar to the
    even-even block of the full (2m+1)-point lattice operator, so its
    eigenvalues are a subset of the full spectrum -- including the ground
    level, whose eigenfunction is even in both coordinates.

    Nodes where the sampled potential reaches the clamp ceiling are
    deleted (hard Dirichlet wall at the clamp contour instead of a finite
    1e7 barrier). The low eigenfunctions decay through that barrier like
    exp(-sqrt(1e7) h) per cell, so the deletion is far below solver
    tolerance, while at steep exponents it shrinks the matrix to the thin
    cross along the axes where the dynamics actually happens.

    Returns (A, active): the reduced CSR matrix and the boolean node mask
    into the full m*m quarter lattice.
    """
    import scipy.sparse as sp

    h = R / m
    n = m if bc is BoundaryKind.DIRICHLET else m + 1
    diag = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    off[0] = -math.sqrt(2.0) / h**2
    if bc is BoundaryKind.NEUMANN:
        diag[-1] = 1.0 / h**2
    K = sp.diags([off, diag, off], [-1, 0, 1], format="csr")
    eye = sp.identity(n, format="csr")
    ax = np.arange(n) * h
    xg, yg = np.meshgrid(ax, ax, indexing="ij")
    from .discretize2d import POTENTIAL_CAP
    from .potential import potential_2d

    V = potential_2d(xg, yg, params).ravel()
    active = V < POTENTIAL_CAP
    A = sp.kron(K, eye, format="csr") + sp.kron(eye, K, format="csr")
    A = (A + sp.diags(np.minimum(V, POTENTIAL_CAP), format="csr")).tocsr()
    if not active.all():
        A = A[active][:, active].tocsr()
    return A, active


def _prolong_even(
    coarse: np.ndarray,
    m_c: int,
    m_f: int,
    R: float,
    bc: BoundaryKind = BoundaryKind.DIRICHLET,
) -> np.ndarray:
    """Bilinear prolongation of even-sector blocks between nested lattices."""
    from scipy.interpolate import RegularGridInterpolator

    h_c = R / m_c
    h_f = R / m_f
    dirichlet = bc is BoundaryKind.DIRICHLET
    n_c = m_c if dirichlet else m_c + 1
    n_f = m_f if dirichlet else m_f + 1
    # undo the sqrt(2) axis scaling, interpolate function values, reapply
    ax_c = np.arange(n_c + 1 if dirichlet else n_c) * h_c
    ax_f = np.arange(n_f) * h_f
    xf, yf = np.meshgrid(ax_f, ax_f, indexing="ij")
    pts = np.column_stack([xf.ravel(), yf.ravel()])
    root2 = math.sqrt(2.0)
    cols = []
    for j in range(coarse.shape[1]):
        if dirichlet:
            F = np.zeros((n_c + 1, n_c + 1))  # Dirichlet zero at the wall
            F[:n_c, :n_c] = coarse[:, j].reshape(n_c, n_c)
        else:
            F = coarse[:, j].reshape(n_c, n_c).copy()
        F[0, :] /= root2
        F[:, 0] /= root2
        interp = RegularGridInterpolator((ax_c, ax_c), F, method="linear")
        fine = interp(pts).reshape(n_f, n_f)
        fine[0, :] *= root2
        fine[:, 0] *= root2
        cols.append(fine.ravel())
    return np.column_stack(cols)


def ground_energy_even(
    params: PotentialParams,
    R: float,
    spacing: float,
    count: int = 1,
    tol: float = 1e-8,
    seed: int = 42,
    maxit: int = 3000,
    bc: BoundaryKind = BoundaryKind.DIRICHLET,
) -> SpectrumResult:
    """Lowest eigenvalues within the even-even symmetry sector.

    Identical numbers to `solve_operator` on the full (2m+1)-point lattice
    for levels whose eigenfunctions are even in both coordinates -- in
    particular the ground level -- at a quarter of the matrix dimension.
    This is the fast path for fine-lattice grid-convergence studies.
    """
    m = max(4, round(R / spacing))
    return _solve_even(params, R, m, count, tol, seed, maxit, None, bc)


def _solve_even(params, R, m, count, tol, seed, maxit, x0,
                bc=BoundaryKind.DIRICHLET):
    csr, active = _assemble_even_sector(params, R, m, bc)
    if x0 is None and m > 50 and m % 2 == 0:
        coarse = _solve_even(params, R, m // 2, count, max(tol, 1e-6),
                             seed, maxit, None, bc)
        if coarse.eigenvectors is not None:
            x0 = _prolong_even(coarse.eigenvectors, m // 2, m, R, bc)
    if x0 is not None and x0.shape[0] == active.size and not active.all():
        x0 = x0[active]
    precond = None
    # exact LU only when node deletion left a thin cross-shaped domain;
    # on (near-)square domains the fill would be prohibitive. Thin domains
    # get the factor at any size: Jacobi cannot cope with the 1e7 dynamic
    # range the clamp leaves on the diagonal.
    thin = csr.shape[0] <= min(_DIRECT_DIM_MAX, round(0.15 * active.size))
    build = _direct_precond if thin else _ilu_precond
    if thin or csr.shape[0] >= _ILU_DIM_THRESHOLD:
        shift = 1.0
        if x0 is not None and x0.shape[1] > 0:
            q = x0[:, 0]
            e1 = float(q @ (csr @ q)) / float(q @ q)
            shift = 1.0 + max(0.0, -e1)
        precond = build(csr, shift)
    first_maxit = min(maxit, 200) if precond is not None else maxit
    res = lobpcg(csr, count, tol, maxit=first_maxit, seed=seed, x0=x0,
                 precond=precond)
    if not res.converged and precond is not None:
        shift = 1.0 + max(0.0, -float(res.eigenvalues[0])) * 1.05
        precond = build(csr, shift)
        res = lobpcg(csr, count, tol, maxit=maxit, seed=seed,
                     x0=res.eigenvectors, precond=precond)
    if not active.all() and res.eigenvectors is not None:
        # re-embed onto the full quarter lattice (zeros on deleted nodes)
        # so warm starts and prolongation see a fixed-shape vector
        full = np.zeros((active.size, res.eigenvectors.shape[1]))
        full[active] = res.eigenvectors
        res = replace(res, eigenvectors=full)
    return res


@dataclass
class ScanRow:
    """One cutoff radius with its certified lowest eigenvalues."""

    radius: float
    eigenvalues: np.ndarray
    residuals: np.ndarray
    converged: bool


def cutoff_scan(
    params: PotentialParams,
    radii: Sequence[float],
    bc: BoundaryKind,
    count: int,
    spacing: float,
    tol: float = 1e-8,
    seed: int = 42,
) -> list[ScanRow]:
    """Lowest eigenvalues of the truncated operator for each cutoff radius."""
    radii = list(radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    if not spacing <= 0.1:
        raise ValueError(f"spacing must be <= 0.1, got {spacing}")

    def job(R):
        res = solve_operator(params, R, spacing, bc, count, tol=tol, seed=seed)
        return ScanRow(
            radius=float(R),
            eigenvalues=res.eigenvalues.copy(),
            residuals=res.residuals.copy(),
            converged=res.converged,
        )

    return _map_ordered(job, radii)


def dn_bracket(
    params: PotentialParams,
    R: float,
    spacing: float,
    count: int,
    tol: float = 1e-8,
    seed: int = 42,
) -> list[tuple[float, float]]:
    """(E_j^Neumann, E_j^Dirichlet) pairs on identical lattices."""
    jobs = [BoundaryKind.NEUMANN, BoundaryKind.DIRICHLET]
    neu, dir_ = _map_ordered(
        lambda bc: solve_operator(params, R, spacing, bc, count, tol=tol, seed=seed),
        jobs,
    )
    return list(zip(neu.eigenvalues.tolist(), dir_.eigenvalues.tolist()))


@dataclass
class CriticalLambdaResult:
    """Bisection output for the coupling where E_1 crosses zero."""

    value: float
    bracket: tuple[float, float]
    iterations: int
    max_residual: float
    gamma_p: float

    def __float__(self) -> float:
        return self.value


def critical_lambda(
    p: float,
    R: float,
    spacing: float,
    tol: float = 1e-3,
    solver_tol: float = 1e-8,
    seed: int = 42,
) -> CriticalLambdaResult:
    """Coupling lambda*(p) where the lowest Dirichlet eigenvalue crosses 0.

    The ground eigenfunction is even in both coordinates, so each bisection
    step solves the even-even symmetry sector (see `ground_energy_even`):
    identical lattice eigenvalue and residual certificate at a quarter of
    the matrix dimension, which keeps fine lattices affordable at steep p.
    """
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    gam = gamma(p, 1e-8)
    m = max(4, round(R / spacing))
    guess: Optional[np.ndarray] = None
    prev_lam: Optional[float] = None
    max_res = 0.0

    def lowest(lam):
        nonlocal guess, prev_lam, max_res
        if prev_lam is not None and abs(lam - prev_lam) > 0.5:
            guess = None  # stale warm starts mislead the ILU shift
        prev_lam = lam
        params = PotentialParams(p=p, lam=lam)
        res = _solve_even(params, R, m, 1, solver_tol, seed, 3000, guess)
        if not res.converged:
            raise RuntimeError(
                f"eigensolver did not converge at lambda={lam}"
            )
        guess = res.eigenvectors
        max_res = max(max_res, float(res.residuals[:1].max()))
        return float(res.eigenvalues[0])

    lo, hi = 0.0, gam + 1.0
    if lowest(lo) < 0:
        raise RuntimeError("bracket failure: E_1(lambda=0) is negative")
    if lowest(hi) > 0:
        raise RuntimeError(
            f"bracket failure: E_1(lambda={hi}) is positive; no crossing found"
        )
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lowest(mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return CriticalLambdaResult(
        value=0.5 * (lo + hi),
        bracket=(lo, hi),
        iterations=iterations,
        max_residual=max_res,
        gamma_p=gam,
    )


@dataclass
class CriticalScan:
    """lambda*(p) against gamma_p along a p-grid."""

    pvalues: np.ndarray
    lambdastar: np.ndarray
    gammacurve: np.ndarray
    radius: float
    resolution: float
    flagged: np.ndarray = field(default=None)  # curves closer than resolution

    def __post_init__(self):
        if self.flagged is None:
            self.flagged = np.zeros(len(self.pvalues), dtype=bool)


def critical_surface(
    pvalues: Sequence[float],
    R: float,
    spacing: float,
    tol: float = 1e-3,
    solver_tol: float = 1e-8,
    seed: int = 42,
) -> CriticalScan:
    """Trace the positivity boundary lambda*(p) alongside gamma_p.

    The escape channels along the axes narrow like y^{-p/(p+2)}, so a
    lattice that resolves lambda*(p) at small p under-resolves the channel
    walls at steep p and biases lambda* low (spurious negative channel
    states). Each p therefore refines the lattice adaptively: the spacing
    is halved until lambda* moves by no more than the bisection tolerance,
    up to ``_MAX_REFINE`` halvings. Points that exhaust the budget without
    settling are flagged resolution-limited, as are points where the two
    curves are closer than the resolution.
    """
    pvalues = np.asarray(list(pvalues), dtype=float)
    if np.any(pvalues < 1) or np.any(pvalues > 24):
        raise ValueError("pvalues must lie in [1, 24]")

    def job(p):
        try:
            res = critical_lambda(p, R, spacing, tol, solver_tol, seed)
        except RuntimeError:
            return math.nan, gamma(float(p), 1e-8), False
        h = spacing
        for _ in range(_MAX_REFINE):
            try:
                finer = critical_lambda(p, R, h / 2, tol, solver_tol, seed)
            except RuntimeError:
                # finer lattice unaffordable: keep the last value, flagged
                return res.value, res.gamma_p, False
            settled = abs(finer.value - res.value) <= tol
            res, h = finer, h / 2
            if settled:
                return res.value, res.gamma_p, True
        return res.value, res.gamma_p, False

    rows = _map_ordered(job, list(pvalues))
    lambdastar = np.array([r[0] for r in rows])
    gammacurve = np.array([r[1] for r in rows])
    flagged = np.abs(gammacurve - lambdastar) < 2.0 * tol
    flagged |= np.isnan(lambdastar)
    flagged |= np.array([not r[2] for r in rows])
    return CriticalScan(
        pvalues=pvalues,
        lambdastar=lambdastar,
        gammacurve=gammacurve,
        radius=float(R),
        resolution=float(spacing),
        flagged=flagged,
    )


def meeting_interval(scan: CriticalScan) -> Optional[tuple[float, float]]:
    """Bracketing p-interval where gamma_p - lambda*(p) changes sign.

    None means the crossing is not resolved on this scan (the coarse
    resolution near the meeting point is a known limitation).
    """
    gap = scan.gammacurve - scan.lambdastar
    for i in range(len(gap) - 1):
        if math.isnan(gap[i]) or math.isnan(gap[i + 1]):
            continue
        if gap[i] > 0 >= gap[i + 1]:
            return float(scan.pvalues[i]), float(scan.pvalues[i + 1])
    return None


@dataclass
class MomentReport:
    """Eigenvalue moment below Lambda with the bound's Lambda-shape."""

    params: PotentialParams
    biglambda: float
    sigma: float
    eigenvalues: np.ndarray
    moment: float
    clambda: float
    boundshape: float
    ratio: float
    gamma_p: float


def bound_clambda(p: float, lam: float, gamma_p: float) -> float:
    """C_lambda = max of the two inverse powers of the subcritical gap."""
    gap = gamma_p - lam
    return max(
        gap ** (-(p + 2.0) / (p * (p + 1.0))),
        gap ** (-((p + 2.0) ** 2) / (4.0 * p * (p + 1.0))),
    )


def bound_shape(p: float, lam: float, gamma_p: float, biglambda: float,
                sigma: float) -> float:
    """The bracketed Lambda-dependence of the trace bound, normalized C=1."""
    gap = gamma_p - lam
    cl = bound_clambda(p, lam, gamma_p)
    expo = sigma + (p + 1.0) / p
    term1 = ((biglambda + 1.0) / gap) ** expo * (
        abs(math.log((biglambda + 1.0) / gap)) + 1.0
    )
    term2 = cl**2 * (biglambda + cl ** (2.0 * p / (p + 2.0))) ** (sigma + 1.0)
    return term1 + term2


def moment_sum(
    params: PotentialParams,
    biglambda: float,
    sigma: float,
    R: float,
    spacing: float,
    tol: float = 1e-8,
    seed: int = 42,
) -> MomentReport:
    """Sum (Lambda - mu_j)_+^sigma over Dirichlet-truncated eigenvalues.

    Dirichlet truncation only raises eigenvalues, so the computed moment
    is a certified lower bound on the untruncated trace.
    """
    gam = gamma(params.p, 1e-8)
    if not params.lam < gam:
        raise ValueError(
            f"moment bound needs lambda < gamma_p, got {params.lam} >= {gam}"
        )
    if not sigma >= 1.5:
        raise ValueError(f"sigma must be >= 3/2, got {sigma}")
    if not biglambda >= 0:
        raise ValueError(f"Lambda must be >= 0, got {biglambda}")

    count = 8
    while True:
        res = solve_operator(
            params, R, spacing, BoundaryKind.DIRICHLET, count, tol=tol, seed=seed
        )
        if res.eigenvalues[-1] > biglambda:
            break
        count *= 2
        if count > _MOMENT_COUNT_CAP:
            raise RuntimeError(
                f"more than {_MOMENT_COUNT_CAP} eigenvalues below Lambda"
            )
    below = res.eigenvalues[res.eigenvalues < biglambda]
    moment = float(np.sum((biglambda - below) ** sigma))
    cl = bound_clambda(params.p, params.lam, gam)
    shape = bound_shape(params.p, params.lam, gam, biglambda, sigma)
    return MomentReport(
        params=params,
        biglambda=biglambda,
        sigma=sigma,
        eigenvalues=below,
        moment=moment,
        clambda=cl,
        boundshape=shape,
        ratio=moment / shape,
        gamma_p=gam,
    )


@dataclass
class EigenfunctionGrid:
    """A single eigenfunction re-embedded on the full lattice."""

    xaxis: np.ndarray
    yaxis: np.ndarray
    values: np.ndarray
    eigenvalue: float
    residual: float


def export_eigenfunction(
    params: PotentialParams,
    R: float,
    spacing: float,
    bc: BoundaryKind,
    index: int,
    tol: float = 1e-8,
    seed: int = 42,
) -> EigenfunctionGrid:
    """Gridded samples of the index-th eigenfunction (index >= 1).

    Sign fixed positive at the origin (falling back to the peak when the
    function vanishes there) and unit-normalized under h^2 quadrature.
    """
    if index < 1:
        raise ValueError(f"index must be >= 1, got {index}")
    res = solve_operator(params, R, spacing, bc, index, tol=tol, seed=seed)
    grid = build_grid(R, _npts_for(R, spacing))
    vec = res.eigenvectors[:, index - 1]
    full = embed_full(grid, bc, vec)
    mid = grid.npts // 2
    anchor = full[mid, mid]
    if abs(anchor) < 1e-12:
        anchor = full.flat[np.argmax(np.abs(full))]
    if anchor < 0:
        full = -full
    full /= math.sqrt(np.sum(full**2) * grid.spacing**2)
    return EigenfunctionGrid(
        xaxis=grid.axis(),
        yaxis=grid.axis(),
        values=full,
        eigenvalue=float(res.eigenvalues[index - 1]),
        residual=float(res.residuals[index - 1]),
    )
