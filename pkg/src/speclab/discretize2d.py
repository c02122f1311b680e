"""Finite-difference discretization of the operator family on (-R, R)^2.

Second-order 5-point stencils on a uniform lattice with the origin as a
node. Dirichlet eliminates the boundary nodes; Neumann keeps them with
half-weighted stiffness rows, so the Dirichlet matrix is exactly a
principal submatrix of the Neumann one and eigenvalue bracketing holds
by Cauchy interlacing with no tolerance.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .potential import PotentialParams, potential_2d

__all__ = [
    "BoundaryKind",
    "Grid2D",
    "SparseSymmetric",
    "build_grid",
    "assemble_2d",
    "embed_full",
    "POTENTIAL_CAP",
]

# Hard-wall ceiling for the sampled potential; see assemble_2d. Low enough
# to keep eps * ||A|| under the solver tolerances, high enough that the
# clamped region lies far outside the low eigenfunctions' support.
POTENTIAL_CAP = 1e7


class BoundaryKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class Grid2D:
    """Uniform lattice on [-R, R]^2 with npts points per axis (npts odd)."""

    radius: float
    npts: int

    @property
    def spacing(self) -> float:
        return 2.0 * self.radius / (self.npts - 1)

    def axis(self) -> np.ndarray:
        return np.linspace(-self.radius, self.radius, self.npts)


@dataclass
class SparseSymmetric:
    """CSR storage of a symmetric matrix (full pattern, sorted columns)."""

    dim: int
    rowptr: np.ndarray
    colidx: np.ndarray
    values: np.ndarray

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, self.colidx, self.rowptr), shape=(self.dim, self.dim)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.to_csr() @ v

    def diagonal(self) -> np.ndarray:
        return self.to_csr().diagonal()

    @classmethod
    def from_scipy(cls, mat) -> "SparseSymmetric":
        csr = sp.csr_matrix(mat)
        csr.sort_indices()
        return cls(
            dim=csr.shape[0],
            rowptr=csr.indptr.copy(),
            colidx=csr.indices.copy(),
            values=csr.data.copy(),
        )


def build_grid(R: float, npts: int) -> Grid2D:
    if not R > 0:
        raise ValueError(f"radius must be positive, got {R}")
    if npts < 9:
        raise ValueError(f"npts must be >= 9, got {npts}")
    if npts % 2 == 0:
        raise ValueError(f"npts must be odd so the origin is a node, got {npts}")
    return Grid2D(radius=float(R), npts=int(npts))


def _laplacian_1d_dirichlet(m: int, h: float) -> sp.csr_matrix:
    # m interior points; wall nodes eliminated.
    main = np.full(m, 2.0 / h**2)
    off = np.full(m - 1, -1.0 / h**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def _laplacian_1d_neumann(m: int, h: float) -> sp.csr_matrix:
    # Half-weighted stiffness rows at the ends: row sums are exactly zero.
    main = np.full(m, 2.0 / h**2)
    main[0] = main[-1] = 1.0 / h**2
    off = np.full(m - 1, -1.0 / h**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def assemble_2d(
    grid: Grid2D,
    params: PotentialParams,
    bc: BoundaryKind,
    include_potential: bool = True,
) -> SparseSymmetric:
    """5-point Laplacian plus node-sampled potential on the truncated square.

    include_potential=False is the test hook giving the bare Laplacian.
    """
    h = grid.spacing
    axis = grid.axis()
    if bc is BoundaryKind.DIRICHLET:
        coords = axis[1:-1]
        lap1d = _laplacian_1d_dirichlet(grid.npts - 2, h)
    else:
        coords = axis
        lap1d = _laplacian_1d_neumann(grid.npts, h)
    m = coords.size
    eye = sp.identity(m, format="csr")
    lap = sp.kron(lap1d, eye, format="csr") + sp.kron(eye, lap1d, format="csr")
    if include_potential:
        # Row-major node ordering: index = iy * m + ix would transpose x/y;
        # we use index = i * m + j with x = coords[i], y = coords[j]. The
        # potential is (x, y)-symmetric so the choice only fixes a convention.
        xg, yg = np.meshgrid(coords, coords, indexing="ij")
        v = potential_2d(xg, yg, params).ravel()
        # clamp acts as a hard wall: steep exponents reach |xy|^p ~ 1e41
        # inside the box, which both overwhelms float64 conditioning (the
        # low levels become garbage) and starves the eigensolver; levels
        # of size O(1) shift by < 1e-6 under the clamp (barrier tunneling)
        v = np.minimum(v, POTENTIAL_CAP)
        lap = lap + sp.diags(v, format="csr")
    return SparseSymmetric.from_scipy(lap)


def embed_full(grid: Grid2D, bc: BoundaryKind, vec: np.ndarray) -> np.ndarray:
    """Re-embed a solution vector onto the full npts x npts lattice.

    Dirichlet vectors get zeros on the eliminated boundary ring.
    """
    n = grid.npts
    if bc is BoundaryKind.DIRICHLET:
        full = np.zeros((n, n))
        full[1:-1, 1:-1] = vec.reshape(n - 2, n - 2)
        return full
    return vec.reshape(n, n).copy()
