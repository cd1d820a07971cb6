"""Command line front end: ``vlab solve | tangents | verify | sweep``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, parse_grid
from .fieldio import atomic_write, dumps_csv, save_field
from .kahler import reports_table, reports_to_json
from .solver import BradlowBoundError, ConvergenceError, solve
from .sweep import rows_to_csv, run_sweep
from .tangent import gram_matrix, position_basis
from .verify import BatteryOptions, default_psi0s, run_battery, threads_from_env

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BRADLOW = 2
EXIT_CONVERGENCE = 3
EXIT_VERIFY = 4

log = logging.getLogger("vlab")


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _solve(cfg: RunConfig):
    s = cfg.build_surface()
    H = cfg.build_metric(s)
    return solve(s, cfg.bundle.N, cfg.bundle.positions, H, cfg.solver_options())


def _summary(sol) -> dict:
    s = sol.surface
    integral = float(s.integral_dxdy(sol.psi2 * s.h2))
    return {
        "converged": True,
        "N": sol.degree,
        "positions": [list(p) for p in sol.positions],
        "grid": [s.nx, s.ny],
        "Lx": s.Lx,
        "Ly": s.Ly,
        "iterations": sol.iterations,
        "residual1": sol.residual1,
        "residual2": sol.residual2,
        "area": s.area,
        "integral_psi2": integral,
        "bradlow_value": s.area - integral,
        "bradlow_target": float(np.pi * sol.degree),
        "bradlow_defect": sol.bradlow_defect(),
        "max_psi2": sol.max_psi2,
    }


def cmd_solve(cfg: RunConfig, out: Path, args) -> int:
    sol = _solve(cfg)
    s = sol.surface
    save_field(out / "psi.vlab", sol.psi, s.Lx, s.Ly)
    save_field(out / "v.vlab", sol.v, s.Lx, s.Ly)
    atomic_write(out / "psi2.csv", dumps_csv(sol.psi2, s.Lx, s.Ly))
    summary = _summary(sol)
    atomic_write(out / "summary.json", _dump_json(summary))
    print(f"converged in {sol.iterations} iterations: residual1={sol.residual1:.3e} "
          f"residual2={sol.residual2:.3e} bradlow_defect={summary['bradlow_defect']:.3e}")
    return EXIT_OK


def cmd_tangents(cfg: RunConfig, out: Path, args) -> int:
    sol = _solve(cfg)
    basis = position_basis(sol, cfg.verify.tangent_eps, cfg.solver_options())
    G = gram_matrix(sol, basis)
    labels = [f"{d}{k}" for k in range(sol.degree) for d in ("x", "y")]
    lines = ["," + ",".join(labels)]
    for lab, row in zip(labels, G):
        lines.append(lab + "," + ",".join(repr(float(v)) for v in row))
    text = "\n".join(lines) + "\n"
    atomic_write(out / "gram.csv", text)
    print(text, end="")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path, args) -> int:
    sol = _solve(cfg)
    v = cfg.verify
    opts = BatteryOptions(seed=v.seed, count=v.count, gauge_count=v.gauge_count,
                          hamiltonian_count=v.hamiltonian_count, eps=tuple(v.eps),
                          tangent_eps=v.tangent_eps, threads=threads_from_env(),
                          sabotage=args.sabotage)
    psi0s = default_psi0s(sol, cfg.psi0.zeros or None)
    reports = run_battery(sol, opts, psi0s)
    atomic_write(out / "report.json", reports_to_json(reports))
    table = reports_table(reports)
    atomic_write(out / "report.txt", table)
    print(f"seed={v.seed}")
    print(table, end="")
    failed = [r.identity for r in reports if not r.passed]
    if failed:
        print(f"{len(failed)} identities failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path, args) -> int:
    s = cfg.build_surface()
    H = cfg.build_metric(s)
    rows = run_sweep(s, cfg.bundle.N, cfg.bundle.positions, cfg.sweep_points(),
                     threads=threads_from_env(), H=H, opts=cfg.solver_options(),
                     eps=cfg.verify.tangent_eps, psi0_choice=cfg.psi0.choice,
                     psi0_zeros=cfg.psi0.zeros or None)
    text = rows_to_csv(rows)
    atomic_write(out / "sweep.csv", text)
    print(text, end="")
    bad = sum(1 for r in rows if r["error"])
    if bad:
        print(f"{bad} of {len(rows)} rows failed", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "tangents": cmd_tangents,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="TOML run configuration")
        sp.add_argument("--out", type=Path, help="output directory (overrides [output] directory)")
        sp.add_argument("--seed", type=int, help="battery seed (overrides [verify] seed)")
        sp.add_argument("--grid", help="grid size as <nx>x<ny>")
        sp.add_argument("--sabotage", action="store_true", help=argparse.SUPPRESS)
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        grid = parse_grid(args.grid) if args.grid else None
        cfg = cfg.with_overrides(seed=args.seed, grid=grid, out=args.out)
    except (ConfigError, OSError) as exc:
        print(f"vlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, out, args)
    except BradlowBoundError as exc:
        print(f"vlab: {exc}", file=sys.stderr)
        return EXIT_BRADLOW
    except ConvergenceError as exc:
        atomic_write(out / "summary.json", _dump_json({"converged": False, "error": str(exc),
                                                       "residual": exc.residual}))
        print(f"vlab: solver did not converge: {exc} (last residual {exc.residual:.3e})",
              file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
