"""Vortex solver: scalar reduction of the vortex equations plus Newton iteration.

With Psi = exp(v/2) sigma_ref and a real periodic v, the holomorphicity
equation fixes the connection perturbation

    a = a_ref + (dv/dz dz - dv/dzbar dzbar) / 2

and the curvature equation reduces to

    lap v = 4 h^2 (H |sigma_ref|^2 e^v - 1) + 4 pi N / (Lx Ly).

Integrating gives  Area - int |Psi|^2_H h^2 dx dy = pi N,  so Area > pi N is
necessary.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bundle import (
    Connection,
    HermitianMetric,
    Section,
    curvature,
    dbar_A,
    reference_background,
)
from .surface import OneForm, Surface

log = logging.getLogger(__name__)


class BradlowBoundError(ValueError):
    """No vortex solution exists: Area <= pi N."""


class ConvergenceError(RuntimeError):
    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 60
    tol: float = 1e-10
    # a stalled line search below this residual counts as the rounding floor
    stall_tol: float = 1e-9
    lin_tol: float = 1e-12
    lin_maxiter: int = 2000
    continuation: bool = True


@dataclass(frozen=True, eq=False)
class VortexSolution:
    surface: Surface
    H: HermitianMetric
    degree: int
    positions: tuple
    v: np.ndarray = field(repr=False)
    connection: Connection = field(repr=False)
    section: Section = field(repr=False)
    sigma_ref: Section = field(repr=False)
    residual1: float = math.nan
    residual2: float = math.nan
    iterations: int = 0
    max_psi2: float = math.nan

    @property
    def psi(self):
        return self.section.values

    @property
    def psi2(self):
        return self.H.norm2(self.section.values)

    @property
    def bounded(self) -> bool:
        # |Psi|_H <= 1 is monitored, not enforced
        return self.max_psi2 <= 1.0 + 1e-6

    def bradlow_defect(self) -> float:
        """|Area - int |Psi|^2_H h^2 - pi N| / (pi N)."""
        s = self.surface
        lhs = s.area - float(np.sum(self.psi2 * s.h2) * s.cell)
        return abs(lhs - np.pi * self.degree) / (np.pi * self.degree)


def pcg(apply_A, b, precond, tol, maxiter):
    """Preconditioned conjugate gradients on real arrays; relative residual ``tol``."""
    x = np.zeros_like(b)
    r = b.copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, 0
    z = precond(r)
    p = z.copy()
    rz = np.vdot(r, z).real
    for it in range(1, maxiter + 1):
        Ap = apply_A(p)
        alpha = rz / np.vdot(p, Ap).real
        x += alpha * p
        r -= alpha * Ap
        if np.linalg.norm(r) <= tol * bnorm:
            return x, it
        z = precond(r)
        rz_new = np.vdot(r, z).real
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(f"linear solve did not reach {tol:g}", np.linalg.norm(r) / bnorm)


def helmholtz_preconditioner(s: Surface, shift: float, scale: float = 1.0):
    """Spectral inverse of (-scale * lap + shift)."""
    sym = -scale * s.lap_symbol + shift
    if shift <= 0:
        sym = sym.copy()
        sym[0, 0] = 1.0

    def apply(r):
        return np.fft.ifft2(np.fft.fft2(r) / sym).real

    return apply


def _reconstruct(s, N, v, a_ref, sigma):
    psi = Section(np.exp(0.5 * v) * sigma.values, N)
    dv = s.d(v)
    a = a_ref.a + OneForm.imaginary(0.5 * dv)
    return Connection(N, a), psi


def residuals(sol: VortexSolution):
    """(r1, r2): max-norm of F(A) - (1 - |Psi|^2_H) omega, L2 norm of dbar_A Psi."""
    return _residuals(sol.surface, sol.H, sol.connection, sol.section)


def _residuals(s, H, A, psi):
    mu = curvature(s, A).f - (1.0 - H.norm2(psi.values)) * s.h2
    r1 = float(np.max(np.abs(mu)))
    db = dbar_A(s, A, psi)
    r2 = float(np.sqrt(np.sum(np.abs(db) ** 2) * s.cell))
    return r1, r2


def check_bradlow(s: Surface, N: int):
    if not s.area > np.pi * N:
        raise BradlowBoundError(
            f"Bradlow bound violated: Area = {s.area:.6g} <= pi N = {np.pi * N:.6g}; "
            "no degree-%d vortex solution exists on this surface" % N
        )


def solve(s: Surface, N: int, positions, H: HermitianMetric | None = None,
          opts: SolverOptions | None = None, v0=None) -> VortexSolution:
    """Solve the vortex equations with zeros of Psi at ``positions``.

    Positions are used literally (not reduced mod the lattice): shifting a zero
    by a period is a large gauge transformation of the frame.
    """
    opts = opts or SolverOptions()
    H = H or HermitianMetric.constant(s)
    if N < 1:
        raise ValueError("degree must be at least 1")
    positions = tuple((float(p[0]), float(p[1])) for p in positions)
    if len(positions) != N:
        raise ValueError(f"need {N} positions, got {len(positions)}")
    check_bradlow(s, N)

    a_ref, sigma = reference_background(s, N, positions)
    W = H.values * np.abs(sigma.values) ** 2
    try:
        v, its = _newton(s, N, W, opts, v0)
    except ConvergenceError:
        if not opts.continuation or v0 is not None:
            raise
        log.info("direct Newton failed; continuing in area")
        v, its = _continuation(s, N, W, opts)

    A, psi = _reconstruct(s, N, v, a_ref, sigma)
    r1, r2 = _residuals(s, H, A, psi)
    sol = VortexSolution(s, H, N, positions, v, A, psi, sigma, r1, r2, its,
                         float(np.max(H.norm2(psi.values))))
    if not sol.bounded:
        log.warning("max |Psi|^2_H = %.3g exceeds 1", sol.max_psi2)
    return sol


def _newton(s, N, W, opts, v0=None, h2=None):
    h2 = s.h2 if h2 is None else h2
    c = 4 * np.pi * N / (s.Lx * s.Ly)
    v = _initial_guess_h2(s, N, W, h2) if v0 is None else np.array(v0, dtype=float)

    def G(v):
        return s.laplacian(v) - 4 * h2 * (W * np.exp(v) - 1.0) - c

    g = G(v)
    gnorm = np.linalg.norm(g)
    for it in range(1, opts.max_iter + 1):
        if np.max(np.abs(g)) / 4 < opts.tol:
            return v, it - 1
        m = 4 * h2 * W * np.exp(v)
        pre = helmholtz_preconditioner(s, float(m.max()))
        delta, _ = pcg(lambda x: -s.laplacian(x) + m * x, g, pre, opts.lin_tol, opts.lin_maxiter)
        t = 1.0
        for _ in range(40):
            v_new = v + t * delta
            g_new = G(v_new)
            n_new = np.linalg.norm(g_new)
            if np.isfinite(n_new) and n_new < gnorm:
                break
            t *= 0.5
        else:
            r = float(np.max(np.abs(g)) / 4)
            if r < opts.stall_tol:
                return v, it
            raise ConvergenceError("line search failed", r)
        v, g, gnorm = v_new, g_new, n_new
    if np.max(np.abs(g)) / 4 < opts.tol:
        return v, opts.max_iter
    raise ConvergenceError(f"Newton did not converge in {opts.max_iter} iterations",
                           float(np.max(np.abs(g)) / 4))


def _initial_guess_h2(s, N, W, h2):
    area = float(np.sum(h2) * s.cell)
    target = area - np.pi * N
    return np.full(s.shape, math.log(target / float(np.sum(h2 * W) * s.cell)))


def _continuation(s, N, W, opts):
    # factor-2 area staircase: solve with h^2 scaled by 2^j, j = J..0
    J = 4
    v = None
    its = 0
    for j in range(J, -1, -1):
        h2 = s.h2 * 2.0 ** j
        v, k = _newton(s, N, W, replace(opts, continuation=False), v, h2=h2)
        its += k
    return v, its
