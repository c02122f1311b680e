"""speclab: numerics for a 2D Schrodinger family with a spectral transition."""

from .discretize2d import (
    BoundaryKind,
    Grid2D,
    SparseSymmetric,
    assemble_2d,
    build_grid,
)
from .eigensolve import SpectrumResult, certify, dense_oracle, lobpcg, tridiag_lowest
from .experiments import (
    CriticalScan,
    MomentReport,
    critical_lambda,
    critical_surface,
    cutoff_scan,
    dn_bracket,
    export_eigenfunction,
    moment_sum,
)
from .oscillator1d import (
    OscillatorSolution,
    assemble_oscillator,
    gamma,
    gamma_min,
    ground_function,
    truncated_gamma,
)
from .potential import PotentialParams, potential_1d, potential_2d
from .quasimode import PhaseKind, QuasimodeSpec, quasimode_residual

__version__ = "0.1.0"

__all__ = [
    "BoundaryKind",
    "Grid2D",
    "SparseSymmetric",
    "SpectrumResult",
    "OscillatorSolution",
    "PotentialParams",
    "PhaseKind",
    "QuasimodeSpec",
    "CriticalScan",
    "MomentReport",
    "assemble_2d",
    "assemble_oscillator",
    "build_grid",
    "certify",
    "critical_lambda",
    "critical_surface",
    "cutoff_scan",
    "dense_oracle",
    "dn_bracket",
    "export_eigenfunction",
    "gamma",
    "gamma_min",
    "ground_function",
    "lobpcg",
    "moment_sum",
    "potential_1d",
    "potential_2d",
    "quasimode_residual",
    "tridiag_lowest",
    "truncated_gamma",
    "__version__",
]
