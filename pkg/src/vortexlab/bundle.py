"""Degree-N line bundle data on the torus.

Sections are stored in one fixed unitary frame, identical for every choice of
vortex positions.  Values are periodic in x and twisted in y:

    psi(x + Lx, y) = psi(x, y)
    psi(x, y + Ly) = exp(-2 pi i N x / Lx) psi(x, y)

The frame carries the Landau background A_L = (2 pi i N y / (Lx Ly)) dx with
constant curvature coefficient pi N / (Lx Ly) on dz ^ dzbar, so that the
integral of F(A_L) is -2 pi i N.  A connection is stored as A = A_L + a with a
periodic imaginary-valued one-form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .surface import OneForm, Surface, TwoForm, d_one_form, d_zero_form
from .theta import log_theta1


class DegreeMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HermitianMetric:
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(v > 0):
            raise ValueError("Hermitian metric must be positive")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, s: Surface, value=1.0):
        return cls(np.full(s.shape, float(value)))

    def norm2(self, psi):
        """|psi|^2_H = psi H conj(psi)."""
        return self.values * np.abs(psi) ** 2

    def inner(self, psi1, psi2):
        """<psi1, psi2>_H = psi1 H conj(psi2)."""
        return psi1 * self.values * np.conj(psi2)


@dataclass(frozen=True, eq=False)
class Section:
    values: np.ndarray = field(repr=False)
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))


@dataclass(frozen=True, eq=False)
class Connection:
    """A = A_L(degree) + a."""

    degree: int
    a: OneForm

    def __post_init__(self):
        if not self.a.imaginary_valued:
            raise ValueError("connection perturbation must be imaginary valued")


def landau_coefficient(s: Surface, N: int):
    """(1,0) and (0,1) coefficient of A_L; both equal i pi N y / (Lx Ly)."""
    return 1j * np.pi * N * s.Y / (s.Lx * s.Ly)


def reference_curvature(s: Surface, N: int) -> float:
    return np.pi * N / (s.Lx * s.Ly)


def section_ddx(s: Surface, psi):
    return s.ddx(psi)


def section_ddy(s: Surface, psi, N: int):
    """d/dy of a twisted field via demodulation to a y-periodic one."""
    if N == 0:
        return s.ddy(psi)
    rate = 2 * np.pi * N * s.X / (s.Lx * s.Ly)
    phase = np.exp(1j * rate * s.Y)
    return np.conj(phase) * s.ddy(phase * psi) - 1j * rate * psi


def dbar_A(s: Surface, A: Connection, psi: Section):
    """(dbar + A^(0,1)) psi, a twisted field vanishing iff psi is A-holomorphic."""
    if A.degree != psi.degree:
        raise DegreeMismatchError("connection and section have different degrees")
    v = psi.values
    s.check(v)
    d = 0.5 * (section_ddx(s, v) + 1j * section_ddy(s, v, psi.degree))
    return d + (landau_coefficient(s, A.degree) + A.a.q) * v


def d_A_10(s: Surface, A: Connection, psi: Section):
    """(d + A^(1,0)) psi."""
    if A.degree != psi.degree:
        raise DegreeMismatchError("connection and section have different degrees")
    v = psi.values
    d = 0.5 * (section_ddx(s, v) - 1j * section_ddy(s, v, psi.degree))
    return d + (landau_coefficient(s, A.degree) + A.a.p) * v


def curvature(s: Surface, A: Connection) -> TwoForm:
    f = reference_curvature(s, A.degree) + d_one_form(s, A.a).f
    return TwoForm(np.real(f))


def degree_of(s: Surface, A: Connection) -> float:
    """integral F / (-2 pi i)."""
    return float(np.sum(curvature(s, A).f) * s.cell / np.pi)


def gauge_transform(s: Surface, chi, A: Connection, psi: Section):
    """g = exp(i chi): A -> A + g^-1 dg = A + i dchi, psi -> g^-1 psi."""
    chi = np.asarray(chi, dtype=float)
    s.check(chi)
    da = d_zero_form(s, 1j * chi)
    A2 = Connection(A.degree, A.a + da)
    psi2 = Section(np.exp(-1j * chi) * psi.values, psi.degree)
    return A2, psi2


def _zero_sum(zeros):
    zs = np.asarray([complex(*z) if np.ndim(z) else complex(z) for z in zeros], dtype=complex)
    return zs, complex(zs.sum()) if zs.size else 0j


def log_reference_section(s: Surface, N: int, zeros, X=None, Y=None):
    """log of the theta-product section with the given zeros, in the fixed frame.

    Evaluates on the grid unless coordinates ``X``, ``Y`` are given.
    """
    zs, S = _zero_sum(zeros)
    if len(zs) != N:
        raise ValueError(f"need exactly N={N} zeros, got {len(zs)}")
    r = s.Ly / s.Lx
    if X is None:
        X, Y = s.X, s.Y
    Z = X + 1j * Y
    out = 1j * np.pi * N * Z / s.Lx - np.pi * N * Y ** 2 / (s.Lx * s.Ly)
    kappa = (2 * np.pi * S.imag + np.pi * N * s.Ly) / (s.Lx * s.Ly)
    lam = -(np.pi * N + 2 * np.pi * S.real / s.Lx) / s.Ly
    out = out + (kappa + 1j * lam) * Y
    for zk in zs:
        out = out + log_theta1(np.pi * (Z - zk) / s.Lx, r)
    return out, kappa, lam


def reference_background(s: Surface, N: int, zeros):
    """Constant-curvature connection A_ref and a section sigma_ref with
    (dbar + A_ref^(0,1)) sigma_ref = 0 vanishing exactly at ``zeros``.

    A_ref differs from the frame background A_L by a flat constant term that
    depends on the sum of the zeros.
    """
    if N < 0:
        raise ValueError("degree must be non-negative")
    logsig, kappa, lam = log_reference_section(s, N, zeros)
    sigma = np.exp(logsig)
    # constant part: -i kappa dx - i lam dy
    p = 0.5 * (-1j * kappa - lam)
    a = OneForm.imaginary(np.full(s.shape, p, dtype=complex))
    return Connection(N, a), Section(sigma, N)
