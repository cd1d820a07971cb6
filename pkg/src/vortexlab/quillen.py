"""Curvature of the determinant bundles built from dbar + A^(0,1) +- B^(0,1).

The natural Kahler form on (0,1)-parts of unitary connections is

    F(c1, c2) = Re int c1 dzbar ^ *2 (c2 dzbar) = -1/2 int alpha_1 ^ alpha_2

and the Quillen curvature of det(dbar_A) is (i/pi) F.  The shift
B^(0,1) = Psi H conj(psi0) theta_bar with theta_bar = h dzbar is gauge
invariant.  Every value returned here omits the common (i/pi) prefactor,
which is reported symbolically as ``QUILLEN_PREFACTOR``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import DegreeMismatchError, HermitianMetric
from .configuration import Configuration, TangentVector
from .kahler import FixedSection, VerificationReport, _integrate, _real, omega_psi0
from .surface import OneForm, Surface, TwoForm, hodge2, wedge_one_one

QUILLEN_PREFACTOR = "i/pi"


@dataclass(frozen=True, eq=False)
class ZeroOneForm:
    """c dzbar."""

    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=complex))

    def as_one_form(self) -> OneForm:
        return OneForm(np.zeros_like(self.c), self.c)

    def __add__(self, other):
        return ZeroOneForm(self.c + other.c)

    def __sub__(self, other):
        return ZeroOneForm(self.c - other.c)

    @classmethod
    def of(cls, alpha: OneForm) -> ZeroOneForm:
        return cls(alpha.q)


@dataclass(frozen=True, eq=False)
class ThetaForms:
    """theta = h dz and theta_bar = h dzbar, with theta ^ theta_bar = omega."""

    surface: Surface

    @property
    def theta(self) -> OneForm:
        h = self.surface.h
        return OneForm(h.astype(complex), np.zeros(h.shape, dtype=complex))

    @property
    def theta_bar(self) -> OneForm:
        h = self.surface.h
        return OneForm(np.zeros(h.shape, dtype=complex), h.astype(complex))

    def wedge(self) -> TwoForm:
        return wedge_one_one(self.theta, self.theta_bar)


def kahler_form_F(s: Surface, p: ZeroOneForm, q: ZeroOneForm) -> float:
    w = wedge_one_one(p.as_one_form(), hodge2(q.as_one_form()))
    val, _ = _integrate(s, w.f)
    return float(val.real)


def kahler_form_F_full(s: Surface, alpha1: OneForm, alpha2: OneForm) -> float:
    """-1/2 int alpha_1 ^ alpha_2 for imaginary-valued forms."""
    val, scale = _integrate(s, wedge_one_one(alpha1, alpha2).f)
    return -0.5 * _real(val, scale)


def quillen_curvature_value(s: Surface, p: ZeroOneForm, q: ZeroOneForm):
    """The curvature (i/pi) F, returned as (prefactor, F)."""
    return QUILLEN_PREFACTOR, kahler_form_F(s, p, q)


def b_form(s: Surface, psi, psi0: FixedSection, H: HermitianMetric, degree=None) -> ZeroOneForm:
    """B^(0,1) = Psi H conj(psi0) theta_bar.

    Rejects sections of different degrees, whose product is not a function on
    the torus.
    """
    if degree is not None and degree != psi0.degree:
        raise DegreeMismatchError(f"degree {degree} section paired with degree {psi0.degree} psi0")
    return ZeroOneForm(np.asarray(psi) * H.values * np.conj(psi0.values) * s.h)


def _shift_coeffs(cfg, psi0: FixedSection, X: TangentVector, sign: int):
    s, H = cfg.surface, cfg.H
    return X.alpha.q + sign * X.beta * H.values * np.conj(psi0.values) * s.h


def quillen_pm(cfg, psi0: FixedSection, X: TangentVector, Y: TangentVector, sign: int) -> float:
    """Re int (alpha_1^(0,1) +- beta H conj(psi0) theta_bar) ^ *2 (alpha_2^(0,1) +- eta H conj(psi0) theta_bar).

    Pointwise in the frame, so psi0 may have a different degree than Psi; the
    individual signs then depend on the fundamental domain but their sum does not.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cfg = Configuration.of(cfg)
    c1 = _shift_coeffs(cfg, psi0, X, sign)
    c2 = _shift_coeffs(cfg, psi0, Y, sign)
    return kahler_form_F(cfg.surface, ZeroOneForm(c1), ZeroOneForm(c2))


def quillen_expansion(cfg, psi0: FixedSection, X: TangentVector, Y: TangentVector, sign: int) -> float:
    """The same number expanded into its four pointwise terms."""
    cfg = Configuration.of(cfg)
    s, H = cfg.surface, cfg.H
    b1 = X.beta * H.values * np.conj(psi0.values) * s.h
    b2 = Y.beta * H.values * np.conj(psi0.values) * s.h
    a1, a2 = X.alpha.q, Y.alpha.q
    # c1 dzbar ^ conj(c2) dz = c1 conj(c2) dzbar ^ dz = 2i c1 conj(c2) dx dy
    terms = [a1 * np.conj(a2), sign * a1 * np.conj(b2), sign * b1 * np.conj(a2), b1 * np.conj(b2)]
    return float(sum(np.real(2j * s.integral_dxdy(t)) for t in terms))


def verify_prequantum_identity(cfg, psi0: FixedSection, X: TangentVector, Y: TangentVector,
                               tol: float = 1e-10, omega_fn=None, context=None) -> VerificationReport:
    """(F_L+ + F_L-)(X, Y) = (i/pi) Omega_psi0(X, Y), prefactors stripped."""
    omega_fn = omega_fn or omega_psi0
    lhs = quillen_pm(cfg, psi0, X, Y, 1) + quillen_pm(cfg, psi0, X, Y, -1)
    rhs = omega_fn(cfg, psi0, X, Y)
    defect = abs(lhs - rhs) / (1.0 + abs(rhs))
    ctx = {"psi0": psi0.kind, "prefactor": QUILLEN_PREFACTOR}
    ctx.update(context or {})
    return VerificationReport("prequantum_identity", defect, tol, "quillen", ctx)
