"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalFailure` so the CLI can
map it to a single exit code; configuration problems derive from
:class:`ConfigError`.
"""


class LoopContError(Exception):
    """Base class for all package errors; keyword details go into reports."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ConfigError(LoopContError, ValueError):
    pass


class NumericalFailure(LoopContError):
    """A computation could not be completed within its tolerances."""


class BranchCut(NumericalFailure):
    """A point left the domain of the principal-branch retraction."""


class CriticalPoint(NumericalFailure):
    """The kernel bundle of du is undefined (point too close to the real sphere)."""


class ZeroPoint(NumericalFailure):
    pass


class TrackingLoss(NumericalFailure):
    """Consecutive samples too far apart to follow a branch of the double cover."""


class SpectralOverflow(NumericalFailure):
    """Holomorphy/truncation defect above the spectral tolerance."""


class GridMismatch(NumericalFailure):
    pass


class Infeasible(NumericalFailure):
    pass


class DegreeExhausted(NumericalFailure):
    pass


class NewtonDivergence(NumericalFailure):
    pass


class OutOfChart(NumericalFailure):
    pass


class LevelCurveNotFound(NumericalFailure):
    pass


class ConformalStall(NumericalFailure):
    pass


class FejerBudget(NumericalFailure):
    pass


class LiftFailure(NumericalFailure):
    pass


class DegenerateLift(NumericalFailure):
    pass


class StepFailure(NumericalFailure):
    pass


class NotNullHomotopic(NumericalFailure):
    pass


class ExtensionHitsZero(NumericalFailure):
    pass


class TangencyViolation(NumericalFailure):
    pass


class PreconditionError(LoopContError, ValueError):
    """Input violates a documented precondition."""
