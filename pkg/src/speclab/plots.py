"""Figure rendering for CLI reports.

Each function takes the already-computed experiment result plus a target
path and writes a single PNG next to the delimited output. Matplotlib is
forced onto the Agg backend so the CLI works headless.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "plot_scan",
    "plot_bracket",
    "plot_surface",
    "plot_quasimode",
    "plot_moments",
    "plot_eigenfunction",
    "plot_spectrum",
]

_DPI = 150


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def plot_scan(rows, path: str, title: str = "") -> None:
    """E_j against the cutoff radius, one line per eigenvalue index."""
    radii = [r.radius for r in rows]
    vals = np.array([r.eigenvalues for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    for j in range(vals.shape[1]):
        ax.plot(radii, vals[:, j], "o-", label=f"$E_{{{j + 1}}}$")
    ax.set_xlabel("cutoff radius $R$")
    ax.set_ylabel("eigenvalue")
    ax.legend()
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_bracket(pairs, path: str, title: str = "") -> None:
    """Neumann vs Dirichlet eigenvalues by index; the gap is the squeeze."""
    idx = np.arange(1, len(pairs) + 1)
    neu = [a for a, _ in pairs]
    dir_ = [b for _, b in pairs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(idx, neu, "v-", label="Neumann")
    ax.plot(idx, dir_, "^-", label="Dirichlet")
    ax.set_xlabel("index $j$")
    ax.set_ylabel("$E_j$")
    ax.set_xticks(idx)
    ax.legend()
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_surface(scan, path: str) -> None:
    """lambda*(p) against gamma_p; flagged points marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(scan.pvalues, scan.gammacurve, "s-", label=r"$\gamma_p$")
    ax.plot(scan.pvalues, scan.lambdastar, "o-", label=r"$\lambda^*(p)$")
    bad = scan.flagged
    if bad.any():
        ax.plot(scan.pvalues[bad], scan.lambdastar[bad], "rx", ms=10,
                label="resolution-limited")
    ax.set_xlabel("$p$")
    ax.set_ylabel("coupling")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_quasimode(kvalues, relatives, path: str, title: str = "") -> None:
    """Relative quasimode residual against the scale k, log-log."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(kvalues, relatives, "o-")
    ax.set_xlabel("scale $k$")
    ax.set_ylabel(r"$\|(L-\mu)\psi_k\| / \|\psi_k\|$")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3, which="both")
    _save(fig, path)


def plot_moments(biglambdas, moments, ratios, path: str) -> None:
    """Moment and moment/boundshape ratio against Lambda."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(biglambdas, moments, "o-")
    ax1.set_xlabel(r"$\Lambda$")
    ax1.set_ylabel("moment")
    ax1.grid(alpha=0.3)
    ax2.semilogy(biglambdas, ratios, "s-")
    ax2.set_xlabel(r"$\Lambda$")
    ax2.set_ylabel("moment / boundshape")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_eigenfunction(grid, path: str, title: str = "") -> None:
    """Heatmap of the exported eigenfunction on its lattice."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    mesh = ax.pcolormesh(grid.xaxis, grid.yaxis, grid.values.T,
                         shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel("$x$")
    ax.set_ylabel("$y$")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_spectrum(eigenvalues, path: str, title: str = "") -> None:
    """Computed levels as horizontal ticks on an energy axis."""
    fig, ax = plt.subplots(figsize=(3.5, 4.5))
    for e in eigenvalues:
        ax.hlines(e, 0.2, 0.8)
    ax.axhline(0.0, color="r", lw=0.8, ls="--")
    ax.set_xticks([])
    ax.set_ylabel("$E_j$")
    if title:
        ax.set_title(title)
    _save(fig, path)
