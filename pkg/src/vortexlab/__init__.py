"""Abelian vortices on a flat torus and the Kahler geometry of their moduli space."""
from .bundle import Connection, HermitianMetric, Section, reference_background
from .configuration import Configuration, TangentVector
from .kahler import (
    FixedSection,
    VerificationReport,
    complex_structure,
    metric_G,
    omega,
    omega_psi0,
)
from .solver import BradlowBoundError, ConvergenceError, SolverOptions, VortexSolution, solve
from .surface import OneForm, Surface, TwoForm
from .tangent import gauge_project, position_basis, tangent_from_positions

__version__ = "0.1.0"
