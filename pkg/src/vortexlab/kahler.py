"""Metric, complex structure and symplectic forms on configuration space.

For X = (alpha_1, beta), Y = (alpha_2, eta):

    G(X, Y)        = int *1 alpha_1 ^ alpha_2 + 2i int Re<beta, eta>_H omega
    I(X)           = (*1 alpha_1, i beta)
    Omega(X, Y)    = -int alpha_1 ^ alpha_2 - int (beta H conj(eta) - conj(beta) H eta) omega
    Omega_psi0     = same, with omega weighted by |psi0|^2_H
    G_psi0(X, Y)   = Omega_psi0(X, I Y)

The moment map of the gauge action is mu = F(A) - (1 - |Psi|^2_H) omega and
the Hamiltonian of zeta is H_zeta = int zeta mu.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .bundle import HermitianMetric, curvature, log_reference_section
from .configuration import TangentVector
from .surface import (
    Surface,
    TwoForm,
    hodge1,
    integrate_two_form,
    volume_form,
    wedge_one_one,
)

REAL_TOL = 1e-12


class NotRealError(ValueError):
    pass


def _real(value: complex, scale: float) -> float:
    if abs(value.imag) > REAL_TOL * max(scale, 1e-300):
        raise NotRealError(f"expected a real value, imaginary residue {value.imag:.3e}")
    return float(value.real)


@dataclass(frozen=True, eq=False)
class FixedSection:
    """A fixed section psi0 vanishing on (at most) a measure-zero set.

    ``degree`` 0 denotes the trivial-bundle choice |psi0|_H = 1.
    """

    values: np.ndarray = field(repr=False)
    degree: int
    kind: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    def norm2(self, H: HermitianMetric):
        return H.norm2(self.values)

    def zero_fraction(self, H: HermitianMetric) -> float:
        return float(np.mean(self.norm2(H) < 1e-12))

    @classmethod
    def unit(cls, s: Surface, H: HermitianMetric):
        return cls(1.0 / np.sqrt(H.values), 0, "unit")

    @classmethod
    def from_solution(cls, sol):
        return cls(sol.section.values.copy(), sol.section.degree, "solved")

    @classmethod
    def theta(cls, s: Surface, H: HermitianMetric, zeros):
        """Theta-product section with the given zeros, scaled to max |psi0|_H = 1."""
        N = len(zeros)
        logsig, _, _ = log_reference_section(s, N, zeros)
        vals = np.exp(logsig)
        vals /= np.sqrt(np.max(H.norm2(vals)))
        return cls(vals, N, "theta")


def _integrate(s, f):
    """Integral of f dz ^ dzbar and the integral of |f| (scale for realness checks)."""
    w = TwoForm(f)
    return integrate_two_form(s, w), 2 * float(np.sum(np.abs(w.f))) * s.cell


def metric_G(cfg, X: TangentVector, Y: TangentVector) -> float:
    return _real(*_metric_G_complex(cfg, X, Y))


def _metric_G_complex(cfg, X, Y):
    s, H = cfg.surface, cfg.H
    one, s1 = _integrate(s, wedge_one_one(hodge1(X.alpha), Y.alpha).f)
    re_inner = np.real(H.inner(X.beta, Y.beta))
    two, s2 = _integrate(s, re_inner * s.h2)
    return one + 2j * two, s1 + 2 * s2


def metric_G_norm2(cfg, X: TangentVector) -> float:
    """4 int |a|^2 dx dy + 4 int |beta|^2_H h^2 dx dy."""
    s, H = cfg.surface, cfg.H
    a = X.alpha.p
    return float(4 * s.integral_dxdy(np.abs(a) ** 2) + 4 * s.integral_dxdy(H.norm2(X.beta) * s.h2))


def norm_G(cfg, X) -> float:
    return float(np.sqrt(max(metric_G_norm2(cfg, X), 0.0)))


def complex_structure(X: TangentVector) -> TangentVector:
    return TangentVector(hodge1(X.alpha), 1j * X.beta)


def _omega_weighted(cfg, X, Y, weight):
    s, H = cfg.surface, cfg.H
    one, s1 = _integrate(s, wedge_one_one(X.alpha, Y.alpha).f)
    b = H.inner(X.beta, Y.beta)
    two, s2 = _integrate(s, (b - np.conj(b)) * weight * s.h2)
    return -one - two, s1 + s2


def omega(cfg, X: TangentVector, Y: TangentVector) -> float:
    return _real(*_omega_weighted(cfg, X, Y, 1.0))


def omega_psi0(cfg, psi0: FixedSection, X: TangentVector, Y: TangentVector) -> float:
    return _real(*_omega_weighted(cfg, X, Y, psi0.norm2(cfg.H)))


def metric_G_psi0(cfg, psi0: FixedSection, X: TangentVector, Y: TangentVector) -> float:
    return omega_psi0(cfg, psi0, X, complex_structure(Y))


def omega_psi0_negativity_formula(cfg, psi0: FixedSection, X: TangentVector) -> float:
    """-4 int |a|^2 dx dy - 4 int |beta|^2_H |psi0|^2_H h^2 dx dy."""
    s, H = cfg.surface, cfg.H
    a = X.alpha.p
    w = psi0.norm2(H)
    return float(-4 * s.integral_dxdy(np.abs(a) ** 2) - 4 * s.integral_dxdy(H.norm2(X.beta) * w * s.h2))


def moment_map(cfg) -> TwoForm:
    s = cfg.surface
    F = curvature(s, cfg.connection)
    psi2 = cfg.H.norm2(cfg.section.values)
    return F - TwoForm((1.0 - psi2) * volume_form(s).f)


def hamiltonian(cfg, zeta) -> float:
    zeta = np.asarray(zeta)
    mu = moment_map(cfg)
    return _real(*_integrate(cfg.surface, zeta * mu.f))


@dataclass
class VerificationReport:
    identity: str
    defect: float
    tolerance: float
    passed: bool = field(init=False)
    tag: str = "kahler"
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.defect >= 0 and self.tolerance > 0):
            raise ValueError("defect must be nonnegative and tolerance positive")
        self.defect = float(self.defect)
        self.tolerance = float(self.tolerance)
        self.passed = bool(self.defect <= self.tolerance)

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.identity:<40s} defect={self.defect:.3e}  tol={self.tolerance:.0e}"


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


def reports_table(reports) -> str:
    return "\n".join(r.line() for r in reports) + "\n"


def relative(a: float, b: float, scale: float | None = None) -> float:
    s = max(abs(a), abs(b)) if scale is None else scale
    return abs(a - b) / s if s > 0 else abs(a - b)

