"""Exception and warning types."""


class PTCavityError(Exception):
    """Base class for all package errors."""


class ConfigError(PTCavityError, ValueError):
    """Invalid or unparseable experiment configuration."""


class UnstableCavityError(PTCavityError, ValueError):
    """Round-trip matrix outside the stable range |A| < 1."""


class SingularTimeError(PTCavityError, ValueError):
    """Mehler kernel requested at a time where sin(Omega t) vanishes."""


class NumericalError(PTCavityError, RuntimeError):
    """An invariant was breached during a numerical run."""

    def __init__(self, message, round_trip=None):
        if round_trip is not None:
            message = f"round trip {round_trip}: {message}"
        super().__init__(message)
        self.round_trip = round_trip


class ConvergenceError(NumericalError):
    """Iterative method failed to converge within its iteration budget."""


class AliasingWarning(RuntimeWarning):
    """Field magnitude at the window edge exceeds the allowed fraction of the peak."""
