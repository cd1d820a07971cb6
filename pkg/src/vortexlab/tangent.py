"""Tangent vectors to the moduli space at a vortex solution.

Moduli coordinates are vortex positions; raw tangents come from re-solving at
displaced positions, and are then made G-orthogonal to the gauge orbit.
"""
from __future__ import annotations

import logging

import numpy as np

from .bundle import Section, dbar_A, log_reference_section
from .configuration import Configuration, TangentVector
from .kahler import complex_structure, metric_G, norm_G
from .solver import SolverOptions, helmholtz_preconditioner, pcg, solve
from .surface import OneForm, band_limited_field, d_one_form, d_zero_form

log = logging.getLogger(__name__)

FD_WARN = 1e-4


def gauge_vector_field(cfg, zeta) -> TangentVector:
    """X_zeta(A, Psi) = (d zeta, -zeta Psi) for purely imaginary zeta."""
    cfg = Configuration.of(cfg)
    zeta = np.asarray(zeta)
    if not np.iscomplexobj(zeta) or np.max(np.abs(zeta.real), initial=0.0) > 0.0:
        raise ValueError("gauge generator must be purely imaginary")
    return TangentVector(d_zero_form(cfg.surface, zeta), -zeta * cfg.psi)


def random_gauge_generator(s, rng, modes=3):
    return 1j * band_limited_field(s, rng, modes, complex_valued=False)


def linearization_defect(cfg, X: TangentVector):
    """Relative defects (eq1, eq2) of the linearised vortex equations at X.

    eq1: d alpha + H (Psi conj(beta) + conj(Psi) beta) omega
    eq2: (dbar + A^(0,1)) beta + alpha^(0,1) Psi
    Both are L2 norms divided by the G-norm of X.
    """
    cfg = Configuration.of(cfg)
    s, H, psi = cfg.surface, cfg.H, cfg.psi
    nX = norm_G(cfg, X)
    if nX == 0.0:
        return 0.0, 0.0
    e1 = d_one_form(s, X.alpha).f + H.values * 2 * np.real(psi * np.conj(X.beta)) * s.h2
    e2 = dbar_A(s, cfg.connection, Section(X.beta, cfg.degree)) + X.alpha.q * psi
    n1 = np.sqrt(s.integral_dxdy(np.abs(e1) ** 2))
    n2 = np.sqrt(s.integral_dxdy(np.abs(e2) ** 2))
    return float(n1 / nX), float(n2 / nX)


def orthogonality_residual(cfg, X: TangentVector):
    """Im(dbar a) + h^2 H Im(beta conj(Psi)); vanishes iff X is G-orthogonal to every X_zeta."""
    s = cfg.surface
    return np.imag(s.dbar(X.alpha.p)) + s.h2 * cfg.H.values * np.imag(X.beta * np.conj(cfg.psi))


def gauge_project(cfg, X: TangentVector, tol: float = 1e-12) -> TangentVector:
    """X - X_zeta* with zeta* minimising ||X - X_zeta||_G.

    With zeta = i t the normal equations read
    (-lap/4 + h^2 |Psi|^2_H) t = -(Im(dbar a) + h^2 H Im(beta conj(Psi))).
    """
    cfg = Configuration.of(cfg)
    s = cfg.surface
    w = s.h2 * cfg.H.norm2(cfg.psi)
    if not np.any(w > 0):
        raise np.linalg.LinAlgError("projection operator is singular (Psi vanishes identically)")
    rhs = -orthogonality_residual(cfg, X)
    pre = helmholtz_preconditioner(s, float(w.mean()), scale=0.25)
    t, _ = pcg(lambda u: -0.25 * s.laplacian(u) + w * u, rhs, pre, tol, 5000)
    Y = X - gauge_vector_field(cfg, 1j * t)
    return TangentVector(Y.alpha, Y.beta, True, projection_defect(cfg, Y),
                         linearization_defect(cfg, Y))


def projection_defect(cfg, X: TangentVector) -> float:
    """||orthogonality residual||_L2 / ||X||_G (dimensionless)."""
    s = cfg.surface
    nX = norm_G(cfg, X)
    r = orthogonality_residual(cfg, X)
    n = float(np.sqrt(s.integral_dxdy(r ** 2)))
    return n / nX if nX > 0 else n


def orthogonality_battery(cfg, X: TangentVector, rng, count=16, modes=3):
    """max over random zeta of |G(X, X_zeta)| / (||X||_G ||X_zeta||_G)."""
    cfg = Configuration.of(cfg)
    nX = norm_G(cfg, X)
    worst = 0.0
    for _ in range(count):
        Xz = gauge_vector_field(cfg, random_gauge_generator(cfg.surface, rng, modes))
        worst = max(worst, abs(metric_G(cfg, X, Xz)) / (nX * norm_G(cfg, Xz)))
    return worst


def apply_complex_structure(X: TangentVector, cfg=None) -> TangentVector:
    """(alpha, beta) -> (*1 alpha, i beta); defects re-measured when ``cfg`` is given."""
    Y = complex_structure(X)
    if cfg is None:
        return TangentVector(Y.alpha, Y.beta, X.gauge_projected)
    cfg = Configuration.of(cfg)
    return TangentVector(Y.alpha, Y.beta, X.gauge_projected, projection_defect(cfg, Y),
                         linearization_defect(cfg, Y))


def pushforward(X: TangentVector, chi) -> TangentVector:
    """Differential of the gauge transformation g = exp(i chi): (Id, g^-1)."""
    return TangentVector(X.alpha, np.exp(-1j * np.asarray(chi)) * X.beta,
                         X.gauge_projected, X.projection_defect, X.linearization_defect)


def random_tangent(cfg, rng, modes=3) -> TangentVector:
    """Smooth random element of T_p C (not tangent to the solution space)."""
    cfg = Configuration.of(cfg)
    s = cfg.surface
    a = band_limited_field(s, rng, modes)
    N = cfg.degree
    zeros = [(rng.uniform(0, s.Lx), rng.uniform(0, s.Ly)) for _ in range(N)]
    aux = np.exp(log_reference_section(s, N, zeros)[0])
    aux /= np.max(np.abs(aux))
    beta = band_limited_field(s, rng, modes) * cfg.psi + band_limited_field(s, rng, modes) * aux
    return TangentVector(OneForm.imaginary(a), beta)


def _displaced(sol, k, direction, step, opts):
    pos = [list(p) for p in sol.positions]
    if direction == "x":
        pos[k][0] += step
    elif direction == "y":
        pos[k][1] += step
    else:
        raise ValueError("direction must be 'x' or 'y'")
    return solve(sol.surface, sol.degree, pos, sol.H, opts, v0=sol.v)


def _difference(plus, minus, h):
    da = (plus.connection.a - minus.connection.a).scale(1.0 / h)
    db = (plus.section.values - minus.section.values) / h
    return TangentVector(OneForm.imaginary(da.p), db)


def tangent_from_positions(sol, k: int, direction: str, eps: float = 1e-3,
                           opts: SolverOptions | None = None, order: int = 2) -> TangentVector:
    """Raw tangent d(A, Psi)/d(position of vortex k) by central differences.

    ``order`` 2 is the plain central difference; ``order`` 4 adds the 2*eps
    stencil (Richardson).  All solutions share the fixed frame, so the
    difference is smooth everywhere including the vortex cores.
    """
    opts = opts or SolverOptions()
    p1 = _displaced(sol, k, direction, eps, opts)
    m1 = _displaced(sol, k, direction, -eps, opts)
    X = _difference(p1, m1, 2 * eps)
    if order == 4:
        p2 = _displaced(sol, k, direction, 2 * eps, opts)
        m2 = _displaced(sol, k, direction, -2 * eps, opts)
        X2 = _difference(p2, m2, 4 * eps)
        X = TangentVector(OneForm.imaginary((4 * X.alpha.p - X2.alpha.p) / 3), (4 * X.beta - X2.beta) / 3)
    elif order != 2:
        raise ValueError("order must be 2 or 4")
    defect = linearization_defect(sol, X)
    if max(defect) > FD_WARN:
        log.warning("finite-difference tangent has linearization defect %.2e; eps=%g too large?",
                    max(defect), eps)
    return TangentVector(X.alpha, X.beta, False, None, defect)


def position_basis(sol, eps: float = 1e-3, opts=None, order: int = 4):
    """Gauge-projected tangents for every (vortex, direction) pair, in order x0, y0, x1, ..."""
    out = []
    for k in range(sol.degree):
        for d in ("x", "y"):
            out.append(gauge_project(sol, tangent_from_positions(sol, k, d, eps, opts, order)))
    return out


def gram_matrix(cfg, basis, form=metric_G):
    n = len(basis)
    G = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            G[i, j] = form(cfg, basis[i], basis[j])
    return G
