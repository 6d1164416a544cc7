"""Exception types shared across the package."""


class AreaTypeError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateInput(AreaTypeError):
    """The first two points of a configuration span no area, so the
    2x2 matrix built from them is not invertible."""


class PreconditionViolated(AreaTypeError):
    """Inputs fall outside the hypotheses of a quantitative check
    (norm bounds, degeneracy floor, parameter ranges).  Signals that the
    check does not apply, not that the implementation is wrong."""


class InsufficientSpread(AreaTypeError):
    """Too few non-adjacent populated angular sectors to build the
    requested number of separated subsets."""


class BudgetExceeded(AreaTypeError):
    """An enumeration would exceed the configured tuple budget."""


class InsufficientData(AreaTypeError):
    """Not enough data points for a meaningful regression."""


class ScaleOutOfRange(AreaTypeError):
    """Requested dyadic frequency ring does not fit under the grid's
    Nyquist frequency."""


class DegenerateExcess(AreaTypeError):
    """More than half of the sampled tuples were degenerate; the source
    measure is concentrated on a line through the origin."""
