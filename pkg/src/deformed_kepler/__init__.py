"""Geometric mechanics of the Kepler problem on a deformed (noncommutative) phase space.

Every Hamiltonian, chart, first integral, recursion operator and
quasi-bi-Hamiltonian form is an evaluable numeric object, and every stated
identity is available as a residual check (see :mod:`deformed_kepler.verify`
and the ``deformed-kepler`` command).
"""

from .chartcore import Chart, ChartPoint, DiffConfig, DiffScheme
from .errors import (
    ChartMismatch,
    ConstraintInfeasible,
    DeformationRequired,
    Degenerate,
    DomainViolation,
    KeplerError,
    NonFinite,
    SingularStructure,
    StepFailure,
    UnboundState,
)
from .keplermodel import ModelParams

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "ChartPoint",
    "DiffConfig",
    "DiffScheme",
    "ModelParams",
    "KeplerError",
    "DomainViolation",
    "NonFinite",
    "ChartMismatch",
    "SingularStructure",
    "UnboundState",
    "DeformationRequired",
    "StepFailure",
    "ConstraintInfeasible",
    "Degenerate",
]
