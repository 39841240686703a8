"""Exception hierarchy shared by all solver modules.

Two families matter downstream: `ValidationError` subclasses signal bad
inputs or regions the solver deliberately refuses (CLI exit code 1), while
`NumericsError` subclasses signal that a computation ran but its quality
checks failed (CLI exit code 2).
"""


class ValidationError(ValueError):
    """Bad argument or a physics region the solver does not support."""


class InvalidArgumentError(ValidationError):
    pass


class UnsupportedRegionError(ValidationError):
    """Energy (or field) outside the region the formulas are defined on."""


class DimerPoleError(ValidationError):
    """Two-body propagator evaluated at (or too close to) its bound-state pole."""

    def __init__(self, message, energy=None, distance=None):
        super().__init__(message)
        self.energy = energy
        self.distance = distance


class NoBoundStateError(ValidationError):
    """Operation needs a two-body bound state but eps2 = 0."""


class FeshbachPoleError(ValidationError):
    """Scattering length evaluated exactly on resonance, B = B0."""


class NumericsError(RuntimeError):
    """A numerical-quality check failed."""


class AssemblyError(NumericsError):
    """Kernel returned a non-finite value during matrix assembly."""

    def __init__(self, message, row=None, col=None, energy=None):
        super().__init__(message)
        self.row = row
        self.col = col
        self.energy = energy


class SolveError(NumericsError):
    """Linear system singular or unusable; carries the condition estimate."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ExtractionError(NumericsError):
    """Spectator extraction failed for every pivot choice."""


class ThresholdError(NumericsError):
    """Threshold bisection could not bracket the level disappearance."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


class NormalizationError(NumericsError):
    """Wave-function norm did not converge under grid doubling."""


class NumericalQualityError(NumericsError):
    """Result drifted more than tolerated under quadrature refinement."""


class IllConditionedWarning(UserWarning):
    """Condition estimate of a solve exceeded the warning threshold."""


class BornDivergenceWarning(UserWarning):
    """Born partial sums are growing; the iteration does not converge."""
