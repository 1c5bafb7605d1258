"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`PMLError`,
which is itself a :class:`ValueError` so callers that only care about bad
input can catch the builtin.
"""


class PMLError(ValueError):
    """Base class for all package errors."""


class ZeroMassSymbol(PMLError):
    """A prior assigns zero (or negative) probability to some symbol."""


class NotNormalized(PMLError):
    """A probability vector does not sum to one."""


class DimensionMismatch(PMLError):
    """Shapes of a mechanism and a prior (or two vectors) disagree."""


class InvalidMechanism(PMLError):
    """A matrix is not row-stochastic or has entries outside [0, 1]."""


class ZeroProbabilityOutcome(PMLError):
    """Leakage was requested for an outcome that is never released."""


class LiftNotNormalized(PMLError):
    """A lift vector violates ``sum_i prior_i * lift_i == 1``."""


class EmptySample(PMLError):
    """An estimator received no samples."""


class DegenerateVariance(PMLError):
    """A correlation was requested for a constant coordinate."""


class BadAlphabet(PMLError):
    """The alphabet size is not supported by the requested routine."""


class EpsilonOutOfRange(PMLError):
    """The privacy parameter lies outside the routine's domain."""


class NegativeEpsilon(EpsilonOutOfRange):
    """The privacy parameter is negative."""


class NotHighPrivacy(EpsilonOutOfRange):
    """The privacy parameter is not in the first privacy region."""


class TooLarge(PMLError):
    """Brute-force enumeration was requested for too large an alphabet."""


class Infeasible(PMLError):
    """A linear program has no feasible point."""


class Unbounded(PMLError):
    """A linear program is unbounded."""


class InconsistentWeights(PMLError):
    """Output weights and lift vectors do not rebuild a row-stochastic matrix."""


class MethodPrecondition(PMLError):
    """The requested design method does not apply to the given prior and ``eps``."""
