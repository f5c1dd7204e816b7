"""Exception taxonomy shared by the library and the CLI."""


class SiegelError(Exception):
    """Base class for all errors raised by this package."""


class ZeroValuation(SiegelError, ValueError):
    pass


class NotAUnit(SiegelError, ValueError):
    pass


class DyadicPrime(SiegelError, ValueError):
    pass


class DegenerateForm(SiegelError, ValueError):
    pass


class NotHalfIntegral(SiegelError, ValueError):
    pass


class UnsupportedShape(SiegelError, ValueError):
    """Raised when an operation needs n0 >= n - 2 and the lattice has fewer unit slots."""


class HypothesisViolated(SiegelError, ValueError):
    pass


class InconsistentCounts(SiegelError, AssertionError):
    """A count table fed into the series assembly broke a structural identity.

    This signals a counting bug, never a user error.
    """


class PoleAtK(SiegelError, ZeroDivisionError):
    pass


class GuardrailExceeded(SiegelError, RuntimeError):
    pass


class TooLarge(GuardrailExceeded):
    pass
