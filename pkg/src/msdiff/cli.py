"""Command-line interface.

Subcommands: ``run`` (full simulation), ``limit`` (asymptotic-limit solve of
the configured state), ``sweep`` (convergence study over a list of alphas)
and ``check`` (invariant suite on the configured state, no time stepping).
Diagnostics go to stderr, data to CSV files in the configured output
directory.  Exit codes: 0 success, 1 validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import collisions, limit, simulator
from .config import SimConfig, load_config
from .errors import MsdiffError, ValidationError
from .grid import GridField
from .mixture import MixtureSpec, mixture_aggregates, validate_spec
from .presets import initial_grid
from .tensors import SYM_NAMES


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's 2
        raise _UsageError(message)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _write_snapshots(path: Path, snapshots, grid0: GridField) -> None:
    header = ["t", "x", "species", "rho", "u1", "u2", "u3", *SYM_NAMES]
    rows = []
    for t, g in snapshots:
        x = g.x_centers
        for c in range(g.n_cells):
            for i in range(g.n_species):
                rows.append([
                    float(t), float(x[c]), i, float(g.rho[i, c]),
                    *(float(v) for v in g.u[i, :, c]),
                    *(float(v) for v in g.press[i, :, c]),
                ])
    _write_csv(path, header, rows)


def _write_report(path: Path, report: simulator.SimReport) -> None:
    s = report.species_mass.shape[1]
    header = (["t"] + [f"mass_{i}" for i in range(s)]
              + ["momentum_1", "momentum_2", "momentum_3",
                 "energy", "internal_energy", "max_compat_residual",
                 "momentum_source_balance", "energy_source_balance"])
    rows = []
    for k in range(len(report.times)):
        rows.append([
            float(report.times[k]),
            *(float(v) for v in report.species_mass[k]),
            *(float(v) for v in report.momentum[k]),
            float(report.energy[k]), float(report.internal_energy[k]),
            float(report.max_compat[k]), float(report.momentum_balance[k]),
            float(report.energy_balance[k]),
        ])
    _write_csv(path, header, rows)


def _cmd_run(config: SimConfig) -> int:
    report, snapshots = simulator.run(config)
    outdir = Path(config.output_dir)
    grid0 = snapshots[0][1]
    _write_snapshots(outdir / "snapshots.csv", snapshots, grid0)
    _write_report(outdir / "report.csv", report)
    print(
        f"run finished at t = {report.times[-1]:.6g} "
        f"({len(report.times) - 1} steps); wrote "
        f"{outdir / 'snapshots.csv'} and {outdir / 'report.csv'}",
        file=sys.stderr,
    )
    return 0


def _cmd_limit(config: SimConfig) -> int:
    grid = initial_grid(config)
    p_scalar = grid.press[:, :3, :].sum(axis=1) / 3.0
    sol = limit.limit_solution_on_grid(config.spec, grid.rho, p_scalar,
                                       grid.dx, grid.bc)
    r, _ = limit.compatibility_residual(config.spec, grid.rho.T, p_scalar.T)
    header = ["cell", "x", "species", "rho", "p",
              "dev11", "dev22", "dev33", "u1", "u2", "u3", "compat_residual"]
    rows = []
    x = grid.x_centers
    for c in range(grid.n_cells):
        for i in range(grid.n_species):
            rows.append([
                c, float(x[c]), i, float(grid.rho[i, c]), float(p_scalar[i, c]),
                *(float(v) for v in sol.dev_diag[c, i]),
                *(float(v) for v in sol.velocities[c, i]),
                float(r[c, i]),
            ])
    out = Path(config.output_dir) / "limit.csv"
    _write_csv(out, header, rows)
    print(f"limit solve done (max compat residual {sol.compat_residual:.3e}); "
          f"wrote {out}", file=sys.stderr)
    return 0


def _cmd_sweep(config: SimConfig, alphas: list[float]) -> int:
    result = simulator.run_alpha_sweep(config, alphas)
    header = ["alpha", "t_extract", "steps", "velocity_error_rel",
              "deviatoric_error", "observed_order"]
    rows = []
    for k, a in enumerate(result.alphas):
        order = result.orders[k - 1] if k > 0 else float("nan")
        rows.append([float(a), float(result.extraction_times[k]),
                     result.steps[k], float(result.velocity_errors[k]),
                     float(result.deviatoric_errors[k]), float(order)])
    out = Path(config.output_dir) / "sweep.csv"
    _write_csv(out, header, rows)
    for row in rows:
        print(f"alpha={row[0]:.4g}: velocity error {row[3]:.4e}, "
              f"deviatoric error {row[4]:.4e}", file=sys.stderr)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def _check_invariants(config: SimConfig):
    """Yield (name, passed, detail) for the no-stepping invariant suite."""
    spec = config.spec
    validate_spec(spec)
    yield "mixture-spec", True, f"{spec.n_species} species, alpha={spec.alpha}"

    grid = initial_grid(config)
    ok = bool(np.all(grid.rho >= 0.0))
    yield "densities-nonnegative", ok, f"min rho = {grid.rho.min():.3e}"

    p = grid.press
    m1 = p[:, 0, :]
    m2 = p[:, 0, :] * p[:, 1, :] - p[:, 3, :] ** 2
    m3 = (p[:, 0, :] * (p[:, 1, :] * p[:, 2, :] - p[:, 5, :] ** 2)
          - p[:, 3, :] * (p[:, 3, :] * p[:, 2, :] - p[:, 5, :] * p[:, 4, :])
          + p[:, 4, :] * (p[:, 3, :] * p[:, 5, :] - p[:, 1, :] * p[:, 4, :]))
    occ = grid.rho > 0.0
    spd = bool(np.all((m1 > 0) & (m2 > 0) & (m3 > 0) | ~occ))
    yield "pressure-tensors-spd", spd, "leading minors positive"

    # mass-weighted diffusion velocities vanish in every cell
    worst = 0.0
    for c in range(grid.n_cells):
        agg = mixture_aggregates(grid.cell_states(c), spec.alpha)
        drift = sum(st.rho * (st.u - agg.u) for st in grid.cell_states(c))
        scale = max(sum(st.rho * np.linalg.norm(st.u) for st in grid.cell_states(c)),
                    1e-300)
        worst = max(worst, float(np.max(np.abs(drift)) / scale))
    yield "diffusion-velocities-balance", worst <= 1e-12, f"max {worst:.3e}"

    _, margins = limit.build_m(spec, grid.rho.T)
    ok = bool(np.all(margins > 0.0))
    yield "limit-matrix-dominance", ok, f"min margin = {margins.min():.3e}"

    beta = limit.build_beta(spec, grid.rho.T,
                            (grid.press[:, :3, :].sum(axis=1) / 3.0).T)
    ok = bool(np.array_equal(beta[..., 0, :], beta[..., 1, :]))
    yield "beta-transverse-equal", ok, "components 11 and 22 share one formula"

    for i in range(spec.n_species):
        for j in range(spec.n_species):
            a = collisions.angular_coeffs(spec.kernel_l1[i, j], spec.kernel_b[i, j])
            target = 2.0 * np.pi * spec.kernel_l1[i, j]
            if abs(a.trace() - target) > 4.0 * np.spacing(max(target, 1.0)):
                yield "angular-trace", False, f"pair ({i},{j})"
                break
    else:
        yield "angular-trace", True, "trace equals 2 pi ||b||"

    states = grid.cell_states(0)
    worst = 0.0
    for i in range(spec.n_species):
        for j in range(spec.n_species):
            tensor = collisions.momentum_flux_source(i, j, states, spec, spec.alpha)
            e_src = collisions.energy_source(i, j, states, spec, spec.alpha)
            scale = max(abs(e_src), float(np.abs(tensor).max()), 1e-300)
            worst = max(worst, abs(tensor[:3].sum() - e_src) / scale)
    yield "source-trace-identity", worst <= 1e-12, f"max {worst:.3e}"

    compat = simulator.max_compatibility_residual(grid, spec)
    if config.mode == "isothermal":
        yield "compatibility", compat <= 1e-10, f"max residual {compat:.3e}"
    else:
        yield "compatibility(info)", True, f"max residual {compat:.3e}"


def _cmd_check(config: SimConfig) -> int:
    failed = 0
    for name, ok, detail in _check_invariants(config):
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: {detail}", file=sys.stderr)
        failed += 0 if ok else 1
    if failed:
        print(f"{failed} invariant(s) failed", file=sys.stderr)
        return 1
    print("all invariants passed", file=sys.stderr)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="msdiff",
                     description="Moment-based Maxwell-Stefan diffusion toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "integrate a configured scenario"),
        ("limit", "solve the asymptotic-limit system on the configured state"),
        ("sweep", "alpha-convergence study against the limit solution"),
        ("check", "run the invariant suite on the configured state"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to a JSON configuration")
        if name == "sweep":
            p.add_argument("--alphas", required=True,
                           help="comma-separated decreasing values, e.g. 0.1,0.05,0.025")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        config = load_config(args.config)
        if args.command == "run":
            return _cmd_run(config)
        if args.command == "limit":
            return _cmd_limit(config)
        if args.command == "sweep":
            alphas = [float(v) for v in args.alphas.split(",") if v]
            return _cmd_sweep(config, alphas)
        return _cmd_check(config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (MsdiffError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
