"""Command-line entry point: exact, mft, kernel, bath and compare runs.

Progress goes to stderr, one-line summaries to stdout, data to CSV files in
the output directory. All floating-point CSV values are written with 9
significant digits so identical configurations give byte-identical files.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
import time
from pathlib import Path

import numpy as np

from .bath import build_bath_ensemble
from .config import ConfigError, RunConfig, parse_config
from .exact import free_spin_trajectory, thermal_reduced_density
from .kernel import KernelParams, assemble_finite_hamiltonian, memory_function, moments_closed_form
from .mft import build_grid, solve_mft, solve_mft_quadrature
from .svg import emit_svg

_FMT = "%.9g"


def _progress(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def _fmt_row(values) -> str:
    return ",".join(_FMT % v for v in values)


def _write_csv(path: Path, header: str, rows, written: list,
               head_comment: str | None = None) -> None:
    lines = []
    if head_comment:
        lines.append(head_comment)
    lines.append(header)
    lines.extend(_fmt_row(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    written.append(path)


def _bath_ensemble(config: RunConfig, params):
    _progress(f"diagonalizing environment ({params.bath_dim} states, "
              f"{params.n_eig} eigenpairs)")
    return build_bath_ensemble(params, tol=config.eig_tol,
                               max_matvecs=config.eig_max_matvecs)


def _kernel_params(config: RunConfig, params, bath):
    m_b = config.m_b if config.m_b is not None else params.n_eig
    ops = assemble_finite_hamiltonian(params, bath, m_b)
    return KernelParams.from_moments(*moments_closed_form(ops))


def _run_exact(config: RunConfig, params, bath):
    _progress(f"propagating {params.n_eig} trajectories "
              f"(dim {2 * params.bath_dim}, t_max {config.t_max:g})")
    return thermal_reduced_density(
        params, bath, config.t_max, config.dt, dt_out=config.dt_out,
        workers=config.workers, substeps=config.substeps)


def _run_mft(config: RunConfig, params, bath, kparams):
    stats = (bath.sigma_x_mean, bath.sigma_x_var)
    if config.solver == "quadrature":
        return solve_mft_quadrature(params, stats, kparams, config.t_max,
                                    config.dt, dt_out=config.dt_out)
    grid = build_grid(config.grid_n, config.dt)
    return solve_mft(params, stats, kparams, grid, config.t_max, config.dt,
                     dt_out=config.dt_out)


def cmd_bath(config: RunConfig, out: Path, written: list) -> None:
    params = config.model_params()
    bath = _bath_ensemble(config, params)
    _write_csv(out / "bath.csv", "m,epsilon_m,p_m",
               [(m + 1, bath.energies[m], bath.weights[m]) for m in range(bath.n_eig)],
               written,
               head_comment="# sigma_x_mean = %s, sigma_x_var = %s"
               % (_FMT % bath.sigma_x_mean, _FMT % bath.sigma_x_var))
    print(f"bath: {bath.n_eig} levels in [{bath.energies[0]:.6g}, "
          f"{bath.energies[-1]:.6g}], sigma_x mean {bath.sigma_x_mean:.6g} "
          f"var {bath.sigma_x_var:.6g}")


def cmd_kernel(config: RunConfig, out: Path, written: list) -> None:
    params = config.model_params()
    bath = _bath_ensemble(config, params)
    m_b = config.m_b if config.m_b is not None else params.n_eig
    kparams = _kernel_params(config, params, bath)
    print(f"m_b={m_b}: aad={kparams.aad:.9g} aa={kparams.aa:.9g} "
          f"p={kparams.p:.9g} q={kparams.q:.9g}")
    if m_b > 2:
        smaller = KernelParams.from_moments(
            *moments_closed_form(assemble_finite_hamiltonian(params, bath, m_b - 2)))
        print(f"m_b={m_b - 2}: aad={smaller.aad:.9g} aa={smaller.aa:.9g} "
              f"p={smaller.p:.9g} q={smaller.q:.9g}")
    times = np.arange(0.0, config.t_max + 0.5 * config.dt, config.dt)
    w = memory_function(kparams, times)
    _write_csv(out / "kernel.csv", "t,W", zip(times, w), written)


def _trajectory_csv(path: Path, trajectory, written: list) -> None:
    s, x, y, z = trajectory.observables()
    _write_csv(path, "t,S,X,Y,Z", zip(trajectory.times, s, x, y, z), written)


def cmd_exact(config: RunConfig, out: Path, written: list) -> None:
    params = config.model_params()
    bath = _bath_ensemble(config, params)
    start = time.perf_counter()
    trajectory = _run_exact(config, params, bath)
    print(f"exact run finished in {time.perf_counter() - start:.1f} s")
    _trajectory_csv(out / "exact.csv", trajectory, written)


def cmd_mft(config: RunConfig, out: Path, written: list) -> None:
    params = config.model_params()
    bath = _bath_ensemble(config, params)
    kparams = _kernel_params(config, params, bath)
    print(f"memory parameters: p={kparams.p:.6g} q={kparams.q:.6g}")
    trajectory = _run_mft(config, params, bath, kparams)
    _trajectory_csv(out / "mft.csv", trajectory, written)


def cmd_compare(config: RunConfig, out: Path, written: list) -> None:
    params = config.model_params()
    bath = _bath_ensemble(config, params)
    kparams = _kernel_params(config, params, bath)
    _progress(f"memory parameters: p={kparams.p:.6g} q={kparams.q:.6g}")

    exact_traj = _run_exact(config, params, bath)
    mft_traj = _run_mft(config, params, bath, kparams)
    times = exact_traj.times
    if len(mft_traj.times) != len(times) or np.abs(mft_traj.times - times).max() > 1e-9:
        raise RuntimeError("solver output grids disagree")

    s_e, x_e, y_e, z_e = exact_traj.observables()
    s_m, x_m, y_m, z_m = mft_traj.observables()
    x_f, y_f, z_f = free_spin_trajectory(params.omega0, params.beta, times)

    _write_csv(out / "compare.csv",
               "t,S_exact,X_exact,Y_exact,Z_exact,S_mft,X_mft,Y_mft,Z_mft,"
               "X_free,Y_free,Z_free",
               zip(times, s_e, x_e, y_e, z_e, s_m, x_m, y_m, z_m, x_f, y_f, z_f),
               written)
    print(f"compare: mean exact entropy {s_e.mean():.6g}, "
          f"mean mean-field entropy {s_m.mean():.6g}")

    if config.svg:
        panels = [
            ("S", [(times, s_e), (times, s_m)], ["exact", "mean field"]),
            ("X", [(times, x_e), (times, x_m), (times, x_f)],
             ["exact", "mean field", "free"]),
            ("Y", [(times, y_e), (times, y_m), (times, y_f)],
             ["exact", "mean field", "free"]),
            ("Z", [(times, z_e), (times, z_m), (times, z_f)],
             ["exact", "mean field", "free"]),
        ]
        for name, series, labels in panels:
            svg_path = out / f"{name}.svg"
            emit_svg(series, labels, svg_path, x_label="t", y_label=name)
            written.append(svg_path)


_COMMANDS = {
    "exact": cmd_exact,
    "mft": cmd_mft,
    "kernel": cmd_kernel,
    "bath": cmd_bath,
    "compare": cmd_compare,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbath",
        description="Central-spin decoherence in a self-interacting spin "
                    "environment: exact ensemble dynamics and the mean-field "
                    "memory-kernel master equation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("exact", "thermal-ensemble exact dynamics, CSV of t,S,X,Y,Z"),
        ("mft", "mean-field master equation, CSV of t,S,X,Y,Z"),
        ("kernel", "memory-function parameters and W(t) table"),
        ("bath", "environment spectrum, thermal weights and sigma_x stats"),
        ("compare", "exact vs mean-field vs free evolution on one grid"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None,
                       help="key = value configuration file")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--quick", action="store_true",
                       help="small fast preset (n_s=10, n_eig=8, t_max=20)")
        p.add_argument("--svg", action="store_true", help="also write SVG plots")
        p.add_argument("--seed", type=int, default=None,
                       help="sample environment frequencies with this seed")
        p.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="intra-environment coupling")
        p.add_argument("--lambda0", type=float, default=None,
                       help="impurity-environment coupling")
        p.add_argument("--n-s", dest="n_s", type=int, default=None)
        p.add_argument("--n-eig", dest="n_eig", type=int, default=None)
        p.add_argument("--kt", dest="kT", type=float, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--t-max", dest="t_max", type=float, default=None)
        p.add_argument("--dt-out", dest="dt_out", type=float, default=None)
        p.add_argument("--grid-n", dest="grid_n", type=int, default=None)
        p.add_argument("--m-b", dest="m_b", type=int, default=None)
        p.add_argument("--solver", choices=("grid", "quadrature"), default=None)
        p.add_argument("--substeps", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {key: getattr(args, key) for key in
                 ("lam", "lambda0", "n_s", "n_eig", "kT", "dt", "t_max",
                  "dt_out", "grid_n", "m_b", "solver", "substeps", "workers")}
    if args.seed is not None:
        overrides["seed"] = args.seed
        overrides["freq_mode"] = "seeded"
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.svg:
        overrides["svg"] = True

    written: list[Path] = []
    try:
        config = parse_config(args.config, overrides)
        if args.quick:
            preset = {key: overrides[key] for key in ("n_s", "n_eig", "t_max")
                      if overrides.get(key) is not None}
            config = replace(config.quick(), **preset).validate()
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](config, out, written)
        for path in written:
            _progress(f"wrote {path}")
        return 0
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - single-line error contract
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
