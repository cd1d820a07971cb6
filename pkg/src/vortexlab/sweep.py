"""Moduli-metric samples over a grid of vortex positions."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor

from .kahler import FixedSection, metric_G, omega, omega_psi0
from .solver import solve
from .tangent import gauge_project, tangent_from_positions

COLUMNS = ("x", "y", "G11", "G12", "G22", "Omega12", "OmegaPsi0_12", "error")


def choose_psi0(sol, choice: str, zeros=None) -> FixedSection:
    s = sol.surface
    if choice == "unit":
        return FixedSection.unit(s, sol.H)
    if choice == "solved":
        return FixedSection.from_solution(sol)
    if not zeros:
        zeros = [((x + 0.25 * s.Lx) % s.Lx, (y + 0.3 * s.Ly) % s.Ly) for x, y in sol.positions]
    return FixedSection.theta(s, sol.H, zeros)


def sweep_row(surface, N, positions, point, H=None, opts=None, eps=1e-3,
              psi0_choice="solved", psi0_zeros=None) -> dict:
    """Gram entries of G, Omega and Omega_psi0 on the x/y tangents of vortex 0 placed at ``point``."""
    pos = [tuple(point)] + [tuple(p) for p in positions[1:N]]
    row = {"x": float(point[0]), "y": float(point[1])}
    try:
        sol = solve(surface, N, pos, H, opts)
        tx = gauge_project(sol, tangent_from_positions(sol, 0, "x", eps, opts, order=4))
        ty = gauge_project(sol, tangent_from_positions(sol, 0, "y", eps, opts, order=4))
        psi0 = choose_psi0(sol, psi0_choice, psi0_zeros)
        row.update(
            G11=metric_G(sol, tx, tx),
            G12=metric_G(sol, tx, ty),
            G22=metric_G(sol, ty, ty),
            Omega12=omega(sol, tx, ty),
            OmegaPsi0_12=omega_psi0(sol, psi0, tx, ty),
            error="",
        )
    except Exception as exc:  # recorded per row, the sweep carries on
        row.update({k: math.nan for k in COLUMNS[2:-1]})
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(surface, N, positions, points, threads=1, **kw):
    def job(p):
        return sweep_row(surface, N, positions, p, **kw)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(job, points))
    return [job(p) for p in points]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r[c] if c == "error" else repr(float(r[c])) for c in COLUMNS])
    return buf.getvalue()
