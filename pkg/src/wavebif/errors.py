"""Exception hierarchy for wavebif."""


class WavebifError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(WavebifError, ValueError):
    """Model parameters violate the frequency window or Sobolev index rules."""


class NonPositiveK(WavebifError, ValueError):
    pass


class RealityViolation(WavebifError, ValueError):
    pass


class TruncationOverflow(WavebifError):
    pass


class AliasingDetected(WavebifError):
    pass


class KernelModePresent(WavebifError, ValueError):
    pass


class SingularDivisor(WavebifError, ZeroDivisionError):
    pass


class ResonantDenominator(WavebifError, ZeroDivisionError):
    pass


class ContractionFailure(WavebifError):
    pass


class MaxIterExceeded(WavebifError):
    pass


class DomainViolation(WavebifError, ValueError):
    """Damping below the admissible floor ``W0^(2p) theta rho^(2p) / 4``."""


class BracketLost(WavebifError):
    pass
