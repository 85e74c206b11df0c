class LonsimError(Exception):
    """Base class for toolkit errors."""


class InvalidDimensionError(LonsimError, ValueError):
    pass


class DimensionError(LonsimError, ValueError):
    """A bit string does not match the instance dimension."""


class InfeasibleSolutionError(LonsimError, ValueError):
    pass


class GenerationInfeasibleError(LonsimError, RuntimeError):
    pass


class BudgetError(LonsimError, ValueError):
    """Exhaustive work requested beyond the enumeration guard."""


class MixingError(LonsimError, ValueError):
    """Traces or LONs from different instances were combined."""


class SequencingError(LonsimError, ValueError):
    """A LON transformation was applied to the wrong variant."""


class LonParseError(LonsimError, ValueError):
    pass


class EmptyGraphError(LonsimError, ValueError):
    pass


class UndefinedCorrelationError(LonsimError, ValueError):
    pass


class ProjectionError(LonsimError, ValueError):
    pass


class RegressionError(LonsimError, ValueError):
    pass


class RatioUndefinedError(LonsimError, ZeroDivisionError):
    pass
