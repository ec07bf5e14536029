"""Exception hierarchy shared by all modules.

Input problems derive from :class:`ValueError`; broken internal invariants
derive from :class:`InvariantViolation`, which the command line maps to
exit status 2.
"""


class InvariantViolation(RuntimeError):
    """An identity that must hold exactly did not."""


class MalformedProgram(ValueError):
    pass


class MissingVariable(ValueError):
    pass


class NotACertificate(ValueError):
    pass


class NegativeWeight(ValueError):
    pass


class WeightsNotNormalized(ValueError):
    pass


class RegimeRangeError(ValueError):
    pass


class KTooSmall(ValueError):
    pass


class DomainError(ValueError):
    pass


class NonconvergenceError(ValueError):
    pass


class SizeLimitError(ValueError):
    pass


class OddP(ValueError):
    pass


class GridTooCoarse(ValueError):
    pass
