import math

import numpy as np
import pytest

from vortexlab.bundle import HermitianMetric
from vortexlab.solver import (
    BradlowBoundError,
    ConvergenceError,
    SolverOptions,
    helmholtz_preconditioner,
    pcg,
    residuals,
    solve,
)
from vortexlab.surface import Surface


def _ok(sol, r1=1e-8, r2=1e-10, bounded=True):
    assert sol.residual1 < r1
    assert sol.residual2 < r2
    assert sol.bradlow_defect() < 1e-6
    assert sol.bounded or not bounded


def test_single_vortex(sol1):
    _ok(sol1)
    assert residuals(sol1) == (sol1.residual1, sol1.residual2)


def test_two_vortices(sol2):
    _ok(sol2)


def test_zero_at_prescribed_grid_point():
    s = Surface.flat(nx=64, ny=64)
    sol = solve(s, 1, [(s.Lx * 20 / 64, s.Ly * 40 / 64)])
    assert sol.psi2[20, 40] < 1e-20
    # far from the core |Psi| tends to its vacuum value
    assert sol.max_psi2 > 0.99


def test_coincident_zeros():
    s = Surface.flat(nx=64, ny=64)
    _ok(solve(s, 2, [(3.0, 3.0), (3.0, 3.0)]))


def test_near_threshold_rectangle():
    L = math.sqrt(1.05 * math.pi)
    s = Surface.flat(Lx=L, Ly=L, nx=64, ny=64)
    sol = solve(s, 1, [(0.5 * L, 0.5 * L)])
    _ok(sol)
    # dissolving regime: |Psi| stays small everywhere
    assert sol.max_psi2 < 0.2


def test_near_threshold_scaled_h():
    h = math.sqrt(1.05 * 2 * math.pi / (4 * math.pi ** 2))
    s = Surface.flat(nx=64, ny=64, h=h)
    _ok(solve(s, 2, [(1.0, 1.0), (4.0, 5.0)]))


def test_nonconstant_h_and_H():
    s = Surface.flat(nx=64, ny=64, h=lambda x, y: 1 + 0.3 * np.cos(x))
    H = HermitianMetric(1.5 + 0.4 * np.sin(s.Y))
    sol = solve(s, 1, [(2.0, 2.0)], H)
    # |Psi|_H <= 1 needs a flat H; here it is only monitored
    _ok(sol, bounded=False)
    assert sol.max_psi2 > 1.0 and not sol.bounded


def test_rectangular_torus_three_vortices():
    s = Surface.flat(Lx=8.0, Ly=5.0, nx=96, ny=64)
    _ok(solve(s, 3, [(1.0, 1.0), (4.0, 3.0), (6.5, 1.5)]))


def test_translation_covariance():
    s = Surface.flat(nx=64, ny=64)
    dx = s.Lx / 64
    a = solve(s, 1, [(2.0, 3.0)])
    b = solve(s, 1, [(2.0 + 8 * dx, 3.0)])
    c = solve(s, 1, [(2.0, 3.0 + 5 * dx)])
    assert np.max(np.abs(np.roll(a.psi2, 8, axis=0) - b.psi2)) < 1e-10
    assert np.max(np.abs(np.roll(a.psi2, 5, axis=1) - c.psi2)) < 1e-10


def test_bradlow_violation():
    s = Surface.flat(Lx=1.0, Ly=1.0, nx=16, ny=16)
    with pytest.raises(BradlowBoundError, match="Bradlow"):
        solve(s, 1, [(0.5, 0.5)])
    s = Surface.flat(nx=16, ny=16)
    with pytest.raises(BradlowBoundError):
        solve(s, 13, [(1.0, 1.0)] * 13)


def test_nonconvergence_reports_residual():
    s = Surface.flat(nx=32, ny=32)
    with pytest.raises(ConvergenceError) as err:
        solve(s, 1, [(1.0, 1.0)], opts=SolverOptions(max_iter=1, continuation=False))
    assert err.value.residual > 0


def test_warm_start_is_cheaper(sol1):
    warm = solve(sol1.surface, 1, [(2.001, 3.0)], v0=sol1.v)
    cold = solve(sol1.surface, 1, [(2.001, 3.0)])
    assert warm.iterations < cold.iterations
    assert np.max(np.abs(warm.v - cold.v)) < 1e-9


def test_bad_arguments(surf64):
    with pytest.raises(ValueError):
        solve(surf64, 2, [(1.0, 1.0)])
    with pytest.raises(ValueError):
        solve(surf64, 0, [])


def test_pcg_solves_helmholtz(surf64, rng):
    s = surf64
    b = rng.standard_normal(s.shape)
    m = 1.0 + rng.uniform(0, 1, s.shape)
    pre = helmholtz_preconditioner(s, float(m.max()))
    x, its = pcg(lambda u: -s.laplacian(u) + m * u, b, pre, 1e-12, 500)
    assert np.linalg.norm(-s.laplacian(x) + m * x - b) < 1e-10 * np.linalg.norm(b)
    with pytest.raises(ConvergenceError):
        pcg(lambda u: -s.laplacian(u) + m * u, b, pre, 1e-14, 1)
