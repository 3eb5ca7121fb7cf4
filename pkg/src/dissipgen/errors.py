"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`DissipgenError`, so callers (and the CLI) can separate domain
failures from programming errors.
"""


class DissipgenError(Exception):
    """Base class for all library errors."""


# algebra
class NotHermitian(DissipgenError):
    pass


class NotPositiveDefinite(DissipgenError):
    pass


class SingularMatrix(DissipgenError):
    pass


class Overflow(DissipgenError):
    pass


class RankDeficientBasis(DissipgenError):
    pass


# quadruple
class DecompositionFails(DissipgenError):
    pass


class SurjectivityViolated(DissipgenError):
    pass


class SignatureMismatch(DissipgenError):
    pass


class NoTriple(DissipgenError):
    pass


class GreenIdentityViolated(DissipgenError):
    pass


# extension / bridge
class DimensionMismatch(DissipgenError):
    pass


class NotAContraction(DissipgenError):
    pass


class NotUnitary(DissipgenError):
    pass


class NotDissipativeOnS(DissipgenError):
    pass


class CoreNotContained(DissipgenError):
    pass


class InvariantViolation(DissipgenError):
    """A post-condition that should hold by construction did not."""


# semigroup
class NotInDomain(DissipgenError):
    pass


class SingularStep(DissipgenError):
    pass


# sbp
class GridTooSmall(DissipgenError):
    pass


# cli
class ConfigError(DissipgenError):
    """Schema or usage problem in a scenario file."""
