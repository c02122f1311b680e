"""Command-line front end for the experiment suite.

Every subcommand runs one experiment, writes one delimited output file
(CSV with a `# key=value` metadata line, or the JSON mirror of the same
tree), renders a companion PNG figure for the tabular reports, and prints
a one-line summary. Exit status: 0 success, 2 usage error, 3 solver
non-convergence (partial output flagged in the metadata).

All real numbers are serialized with 17 significant digits so re-parsing
an output file recovers them exactly; identical configurations (including
the seed) produce byte-identical delimited output.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, plots
from .discretize2d import BoundaryKind
from .experiments import (
    critical_lambda,
    critical_surface,
    cutoff_scan,
    dn_bracket,
    export_eigenfunction,
    meeting_interval,
    moment_sum,
    solve_operator,
)
from .oscillator1d import NonConvergenceError, default_oscillator, gamma, gamma_min
from .potential import PotentialParams
from .quasimode import QuadratureError, QuasimodeSpec, quasimode_residual

__all__ = ["main"]


def _fmt(x) -> str:
    """17-significant-digit decimal, enough to round-trip any float64."""
    return format(float(x), ".17g")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return str(v)


def _json_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "null" if not math.isfinite(v) else _fmt(v)
    return json.dumps(str(v))


def _write_csv(path: str, meta: dict, columns, rows) -> None:
    lines = ["# " + " ".join(f"{k}={_cell(v)}" for k, v in meta.items())]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, meta: dict, columns, rows) -> None:
    # hand-rolled so numbers keep the same 17-digit decimal form as CSV
    parts = ["{\n  \"metadata\": {"]
    parts.append(",".join(
        f"\n    {json.dumps(k)}: {_json_scalar(v)}" for k, v in meta.items()
    ))
    parts.append("\n  },\n  \"columns\": [")
    parts.append(", ".join(json.dumps(c) for c in columns))
    parts.append("],\n  \"rows\": [")
    body = ",".join(
        "\n    [" + ", ".join(_json_scalar(v) for v in row) + "]" for row in rows
    )
    parts.append(body + ("\n  " if rows else ""))
    parts.append("]\n}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(parts))


def _emit(args, meta: dict, columns, rows) -> str:
    path = args.out
    if path is None:
        path = f"{args.command}.{args.format}"
    if args.format == "csv":
        _write_csv(path, meta, columns, rows)
    else:
        _write_json(path, meta, columns, rows)
    return path


def _plot_path(outpath: str) -> str:
    stem, _ = os.path.splitext(outpath)
    return stem + ".png"


def _metadata(args) -> dict:
    meta = {"command": args.command, "version": __version__}
    skip = {"command", "func", "out", "format"}
    for key, val in vars(args).items():
        if key not in skip:
            meta[key] = val
    meta["format"] = args.format
    return meta


def _floats(csv_list: str) -> list[float]:
    try:
        vals = [float(tok) for tok in csv_list.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"not a comma-separated number list: {csv_list!r}") from exc
    if not vals:
        raise ValueError("empty value list")
    return vals


def _bc(name: str) -> BoundaryKind:
    return BoundaryKind.DIRICHLET if name == "dirichlet" else BoundaryKind.NEUMANN


# ---------------------------------------------------------------- handlers
# each returns (summary, columns, rows, plot_fn_or_None, converged)

def _run_gamma(args, meta):
    val = gamma(args.p, args.tol)
    meta["gamma"] = val
    summary = f"gamma_p = {val:.6f} (p = {args.p:g}, tol = {args.tol:g})"
    return summary, ["p", "gamma"], [[args.p, val]], None, True


def _run_gamma_min(args, meta):
    pstar, gstar = gamma_min(args.plo, args.phi, args.tol)
    meta["pstar"] = pstar
    meta["gammastar"] = gstar
    summary = f"min gamma_p = {gstar:.6f} at p = {pstar:.4f}"
    return summary, ["pstar", "gammastar"], [[pstar, gstar]], None, True


def _run_spectrum(args, meta):
    params = PotentialParams(p=args.p, lam=args.lam)
    res = solve_operator(
        params, args.radius, args.spacing, _bc(args.bc), args.count,
        tol=args.tol, seed=args.seed,
    )
    rows = [
        [j + 1, res.eigenvalues[j], res.residuals[j]]
        for j in range(args.count)
    ]
    summary = (
        f"E_1 = {res.eigenvalues[0]:.6f} "
        f"(p = {args.p:g}, lambda = {args.lam:g}, {args.bc}, R = {args.radius:g})"
    )

    def plot(path):
        plots.plot_spectrum(
            res.eigenvalues, path,
            title=f"$p={args.p:g},\\ \\lambda={args.lam:g}$, {args.bc}",
        )

    return summary, ["index", "eigenvalue", "residual"], rows, plot, res.converged


def _run_scan_r(args, meta):
    params = PotentialParams(p=args.p, lam=args.lam)
    radii = _floats(args.radii)
    scan = cutoff_scan(
        params, radii, _bc(args.bc), args.count, args.spacing,
        tol=args.tol, seed=args.seed,
    )
    rows = []
    for row in scan:
        for j in range(args.count):
            rows.append(
                [row.radius, j + 1, row.eigenvalues[j], row.residuals[j],
                 row.converged]
            )
    ok = all(r.converged for r in scan)
    drift = abs(scan[-1].eigenvalues[0] - scan[0].eigenvalues[0])
    summary = (
        f"E_1 drift {drift:.2e} over R in [{radii[0]:g}, {radii[-1]:g}] "
        f"(final E_1 = {scan[-1].eigenvalues[0]:.6f})"
    )

    def plot(path):
        plots.plot_scan(scan, path, title=f"$p={args.p:g},\\ \\lambda={args.lam:g}$")

    return summary, ["radius", "index", "eigenvalue", "residual", "converged"], \
        rows, plot, ok


def _run_bracket(args, meta):
    params = PotentialParams(p=args.p, lam=args.lam)
    pairs = dn_bracket(
        params, args.radius, args.spacing, args.count,
        tol=args.tol, seed=args.seed,
    )
    rows = [
        [j + 1, neu, dir_, dir_ - neu]
        for j, (neu, dir_) in enumerate(pairs)
    ]
    summary = f"first-level DN gap = {pairs[0][1] - pairs[0][0]:.3e}"

    def plot(path):
        plots.plot_bracket(pairs, path,
                           title=f"$p={args.p:g},\\ \\lambda={args.lam:g}$")

    return summary, ["index", "neumann", "dirichlet", "gap"], rows, plot, True


def _run_critical(args, meta):
    res = critical_lambda(
        args.p, args.radius, args.spacing,
        tol=args.tol, solver_tol=args.solver_tol, seed=args.seed,
    )
    meta["max_residual"] = res.max_residual
    rows = [[args.p, res.value, res.bracket[0], res.bracket[1],
             res.iterations, res.max_residual, res.gamma_p]]
    summary = (
        f"lambda*({args.p:g}) = {res.value:.6f} "
        f"(gamma_p = {res.gamma_p:.6f}, bracket width {args.tol:g})"
    )
    cols = ["p", "lambdastar", "bracket_lo", "bracket_hi", "iterations",
            "max_residual", "gamma_p"]
    return summary, cols, rows, None, res.max_residual <= args.solver_tol


def _run_surface(args, meta):
    pvals = _floats(args.pvalues)
    scan = critical_surface(
        pvals, args.radius, args.spacing,
        tol=args.tol, solver_tol=args.solver_tol, seed=args.seed,
    )
    meet = meeting_interval(scan)
    meta["meeting_lo"] = math.nan if meet is None else meet[0]
    meta["meeting_hi"] = math.nan if meet is None else meet[1]
    rows = [
        [scan.pvalues[i], scan.lambdastar[i], scan.gammacurve[i],
         scan.gammacurve[i] - scan.lambdastar[i], bool(scan.flagged[i])]
        for i in range(len(pvals))
    ]
    if meet is None:
        summary = "no gamma/lambda* crossing resolved on this p-grid"
    else:
        summary = f"curves meet for p in [{meet[0]:g}, {meet[1]:g}]"

    def plot(path):
        plots.plot_surface(scan, path)

    cols = ["p", "lambdastar", "gamma_p", "gap", "flagged"]
    return summary, cols, rows, plot, not np.isnan(scan.lambdastar).all()


def _run_quasimode(args, meta):
    kvals = _floats(args.kvalues)
    osc = default_oscillator(args.p)
    rows = []
    for k in kvals:
        if args.kind == "critical":
            spec = QuasimodeSpec.critical(args.p, args.mu, k, oscillator=osc)
        else:
            params = PotentialParams(p=args.p, lam=args.lam)
            spec = QuasimodeSpec.supercritical(params, args.mu, k, oscillator=osc)
        norm, resid, rel = quasimode_residual(spec)
        rows.append([k, norm, resid, rel])
    meta["gamma_p"] = osc.gamma
    summary = (
        f"relative residual {rows[0][3]:.3e} -> {rows[-1][3]:.3e} "
        f"as k: {kvals[0]:g} -> {kvals[-1]:g}"
    )

    def plot(path):
        plots.plot_quasimode(
            [r[0] for r in rows], [r[3] for r in rows], path,
            title=f"{args.kind}, $p={args.p:g},\\ \\mu={args.mu:g}$",
        )

    return summary, ["k", "norm", "residual", "relative"], rows, plot, True


def _run_moments(args, meta):
    params = PotentialParams(p=args.p, lam=args.lam)
    lambdas = _floats(args.biglambda)
    rows = []
    for big in lambdas:
        rep = moment_sum(
            params, big, args.sigma, args.radius, args.spacing,
            tol=args.tol, seed=args.seed,
        )
        rows.append([big, len(rep.eigenvalues), rep.moment, rep.clambda,
                     rep.boundshape, rep.ratio])
    summary = (
        f"moment {rows[0][2]:.6g} -> {rows[-1][2]:.6g} "
        f"over Lambda in [{lambdas[0]:g}, {lambdas[-1]:g}]"
    )

    def plot(path):
        plots.plot_moments(
            [r[0] for r in rows], [r[2] for r in rows], [r[5] for r in rows], path
        )

    cols = ["biglambda", "count", "moment", "clambda", "boundshape", "ratio"]
    return summary, cols, rows, plot, True


def _run_eigfun(args, meta):
    params = PotentialParams(p=args.p, lam=args.lam)
    grid = export_eigenfunction(
        params, args.radius, args.spacing, _bc(args.bc), args.index,
        tol=args.tol, seed=args.seed,
    )
    meta["eigenvalue"] = grid.eigenvalue
    meta["residual"] = grid.residual
    rows = []
    for i, x in enumerate(grid.xaxis):
        for j, y in enumerate(grid.yaxis):
            rows.append([x, y, grid.values[i, j]])
    summary = (
        f"E_{args.index} = {grid.eigenvalue:.6f}, "
        f"{len(grid.xaxis)}^2 samples written"
    )

    def plot(path):
        plots.plot_eigenfunction(
            grid, path,
            title=f"$E_{{{args.index}}} = {grid.eigenvalue:.5f}$",
        )

    return summary, ["x", "y", "value"], rows, plot, grid.residual <= args.tol


# ----------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="speclab",
        description="numerical experiments for a 2D Schrodinger family",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp, grid=True, lam=True, tol=1e-8):
        sp.add_argument("--p", type=float, required=True, help="potential exponent")
        if lam:
            sp.add_argument("--lambda", dest="lam", type=float, required=True,
                            help="coupling constant")
        if grid:
            sp.add_argument("--radius", type=float, default=20.0)
            sp.add_argument("--spacing", type=float, default=0.05)
        sp.add_argument("--tol", type=float, default=tol)
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--out", type=str, default=None,
                        help="output file (default <command>.<format>)")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--no-plot", action="store_true",
                        help="skip the companion PNG figure")

    sp = sub.add_parser("gamma", help="ground level of the 1D oscillator")
    common(sp, grid=False, lam=False)
    sp.set_defaults(func=_run_gamma)

    sp = sub.add_parser("gamma-min", help="minimize gamma_p over an interval")
    sp.add_argument("--plo", type=float, default=1.0)
    sp.add_argument("--phi", type=float, default=3.0)
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--no-plot", action="store_true")
    sp.set_defaults(func=_run_gamma_min)

    sp = sub.add_parser("spectrum", help="lowest 2D eigenvalues, one grid")
    common(sp)
    sp.add_argument("--bc", choices=["dirichlet", "neumann"], default="dirichlet")
    sp.add_argument("--count", type=int, default=2)
    sp.set_defaults(func=_run_spectrum)

    sp = sub.add_parser("scan-r", help="cutoff-radius scan of the spectrum")
    common(sp)
    sp.add_argument("--radii", type=str, default="6,8,10,12,16,20",
                    help="comma-separated increasing cutoff radii")
    sp.add_argument("--bc", choices=["dirichlet", "neumann"], default="dirichlet")
    sp.add_argument("--count", type=int, default=1)
    sp.set_defaults(func=_run_scan_r)

    sp = sub.add_parser("bracket", help="Neumann/Dirichlet eigenvalue squeeze")
    common(sp)
    sp.add_argument("--count", type=int, default=2)
    sp.set_defaults(func=_run_bracket)

    sp = sub.add_parser("critical", help="coupling where E_1 crosses zero")
    common(sp, lam=False, tol=1e-3)
    sp.add_argument("--solver-tol", type=float, default=1e-8)
    sp.set_defaults(func=_run_critical)

    sp = sub.add_parser("surface", help="lambda*(p) against gamma_p")
    sp.add_argument("--pvalues", type=str, default="1,2,4,8",
                    help="comma-separated exponents in [1, 24]")
    sp.add_argument("--radius", type=float, default=20.0)
    sp.add_argument("--spacing", type=float, default=0.05)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.add_argument("--solver-tol", type=float, default=1e-8)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--no-plot", action="store_true")
    sp.set_defaults(func=_run_surface)

    sp = sub.add_parser("quasimode", help="Weyl-sequence residual decay")
    common(sp, grid=False)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--kind", choices=["supercritical", "critical"],
                    default="supercritical")
    sp.add_argument("--kvalues", type=str, default="50,100,200")
    sp.set_defaults(func=_run_quasimode)

    sp = sub.add_parser("moments", help="eigenvalue moments below Lambda")
    common(sp)
    sp.add_argument("--sigma", type=float, default=1.5)
    sp.add_argument("--biglambda", type=str, default="1,2,4,8",
                    help="comma-separated Lambda values")
    sp.set_defaults(func=_run_moments)

    sp = sub.add_parser("eigfun", help="gridded eigenfunction export")
    common(sp)
    sp.add_argument("--bc", choices=["dirichlet", "neumann"], default="dirichlet")
    sp.add_argument("--index", type=int, default=1)
    sp.set_defaults(func=_run_eigfun)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    meta = _metadata(args)
    try:
        summary, columns, rows, plot, converged = args.func(args, meta)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergenceError, QuadratureError, RuntimeError) as exc:
        # flagged partial output: metadata only, no data rows
        meta["converged"] = False
        # single token so the space-delimited metadata line stays parseable
        meta["error"] = "_".join(str(exc).split())
        path = _emit(args, meta, [], [])
        print(f"not converged: {exc} -> {path}", file=sys.stderr)
        return 3

    meta["converged"] = converged
    path = _emit(args, meta, columns, rows)
    if plot is not None and not args.no_plot:
        plot(_plot_path(path))
    print(f"{summary} -> {path}")
    return 0 if converged else 3


if __name__ == "__main__":
    sys.exit(main())
