class OscTimeError(Exception):
    """Base class for numerical failures raised by this package."""


class DomainError(OscTimeError, ValueError):
    """Parameter outside the domain of a closed form (e.g. ``alpha >= 1``)."""


class DegenerateInputError(OscTimeError, ValueError):
    """Input for which the requested quantity is undefined (e.g. ``x0 == 0``)."""


class IntegrationError(OscTimeError):
    pass


class StepSizeError(IntegrationError):
    """Step size fell below the underflow threshold."""


class DivergenceError(IntegrationError):
    """The state became non-finite."""


class NoOscillationError(OscTimeError):
    """Fewer zero crossings than requested before the time cap."""


class PhaseStallError(OscTimeError):
    """The polar angle stopped rotating monotonically."""


class SingularDenominatorError(OscTimeError):
    pass


class FitError(OscTimeError):
    """Richardson extrapolation did not settle."""
