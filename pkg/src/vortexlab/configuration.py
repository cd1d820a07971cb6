"""Points and tangent vectors of the configuration space (connections x sections)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import Connection, HermitianMetric, Section
from .surface import OneForm, Surface


@dataclass(frozen=True, eq=False)
class Configuration:
    """A pair (A, Psi), not necessarily a vortex solution."""

    surface: Surface
    H: HermitianMetric
    connection: Connection
    section: Section

    @classmethod
    def of(cls, obj) -> Configuration:
        if isinstance(obj, cls):
            return obj
        return cls(obj.surface, obj.H, obj.connection, obj.section)

    @property
    def degree(self) -> int:
        return self.section.degree

    @property
    def psi(self):
        return self.section.values

    def shifted(self, X: TangentVector, eps: float) -> Configuration:
        """p + eps X along the affine structure."""
        A = Connection(self.connection.degree, self.connection.a + X.alpha.scale(float(eps)))
        psi = Section(self.section.values + eps * X.beta, self.section.degree)
        return Configuration(self.surface, self.H, A, psi)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """X = (alpha, beta): alpha an imaginary-valued one-form, beta a section deformation.

    ``beta`` lives in the same fixed frame as the sections.
    """

    alpha: OneForm
    beta: np.ndarray = field(repr=False)
    gauge_projected: bool = False
    projection_defect: float | None = None
    linearization_defect: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=complex))

    @property
    def satisfies_linearization(self) -> bool | None:
        if self.linearization_defect is None:
            return None
        return max(self.linearization_defect) < 1e-6

    def __add__(self, other: TangentVector) -> TangentVector:
        return TangentVector(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: TangentVector) -> TangentVector:
        return TangentVector(self.alpha - other.alpha, self.beta - other.beta)

    def __neg__(self):
        return TangentVector(-self.alpha, -self.beta)

    def scale(self, c: float) -> TangentVector:
        c = float(c)
        return TangentVector(self.alpha.scale(c), c * self.beta)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    @classmethod
    def zero(cls, shape):
        return cls(OneForm.zeros(shape), np.zeros(shape, dtype=complex))
