"""Exception hierarchy shared by every module."""


class KeplerError(Exception):
    """Base class for all errors raised by :mod:`deformed_kepler`."""


class DomainViolation(KeplerError, ValueError):
    """A point (or a finite-difference stencil node) left its chart."""


class NonFinite(KeplerError, ArithmeticError):
    """A field evaluated to inf or nan."""


class ChartMismatch(KeplerError, ValueError):
    """Objects living on different charts were combined."""


class SingularStructure(KeplerError, ZeroDivisionError):
    """A structure matrix (S, its inverse, a 2-form) is singular at the point."""


class UnboundState(KeplerError, ValueError):
    """The operation needs E < 0 (compact case)."""


class DeformationRequired(KeplerError, ValueError):
    """The operation divides by the deformation parameter and needs alpha > 0."""


class StepFailure(KeplerError, RuntimeError):
    """The time integrator could not advance (step underflow, step budget)."""


class ConstraintInfeasible(KeplerError, ValueError):
    """A constraint surface has no real point for the given data."""


class Degenerate(KeplerError, ValueError):
    """A non-degeneracy condition (e.g. a wedge product) fails at the point."""
