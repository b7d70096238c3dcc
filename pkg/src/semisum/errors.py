"""Exception hierarchy shared by all semisum modules."""


class SemisumError(Exception):
    """Base class for every error raised by semisum."""


class DomainError(SemisumError, ValueError):
    """A position lies outside the domain of a potential."""


class NoAllowedRegionError(SemisumError, ValueError):
    """The energy lies at or below the potential infimum."""


class UnboundLevelError(SemisumError, ValueError):
    """A requested level is not bound (or the allowed region is unbounded)."""


class NoClosedFormError(SemisumError, ValueError):
    """No closed-form eigenvalue exists for this potential."""


class NotSupportedError(SemisumError, NotImplementedError):
    """The requested order/combination is deliberately not implemented."""


class PrecisionError(SemisumError, ArithmeticError):
    """A computation failed to reach its requested precision."""


class NormalizationError(SemisumError, ValueError):
    """A density could not be normalized to the requested particle number."""


class UsageError(SemisumError, ValueError):
    """Malformed command-line input."""
