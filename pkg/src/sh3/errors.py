"""Exception hierarchy shared by all modules."""


class SH3Error(Exception):
    """Base class for library errors."""


class InvalidParameters(SH3Error, ValueError):
    pass


class AmbiguousPartition(SH3Error):
    """The maximal-growth set matches none of the four partition classes."""


class WrongClass(SH3Error):
    """Operation called for a domain length in the wrong partition class."""


class DegenerateDenominator(SH3Error, ZeroDivisionError):
    pass


class DegenerateTransitionNumber(SH3Error):
    """A real part (or a required ratio denominator) vanishes; cubic order is inconclusive."""


class IndeterminateBranch(SH3Error):
    """The classification table gives no verdict for this sign pattern."""


class NonzeroB(SH3Error):
    pass


class WrongSide(SH3Error):
    """Hopf amplitude requested on the side of the critical value without an orbit."""


class _WithPartial(SH3Error):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StepSizeUnderflow(_WithPartial):
    """The adaptive step collapsed, typically in finite-time blow-up."""


class NonFiniteState(_WithPartial):
    """A trajectory escaped to overflow.

    ``partial`` holds whatever was computed before the escape (a Trajectory or
    a list of PDE snapshots), so callers can still flush it.
    """


class NoCycleFound(SH3Error):
    pass


class BracketInvalid(SH3Error):
    pass
