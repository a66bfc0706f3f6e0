"""Exception hierarchy shared by all modules."""


class GPLabError(Exception):
    """Base class for library errors."""


class DegenerateInput(GPLabError):
    """Point set does not span the ambient space."""


class EmptyCloud(GPLabError):
    pass


class InvalidDimension(GPLabError):
    pass


class DimensionMismatch(GPLabError):
    pass


class ZeroVector(GPLabError):
    pass


class InvalidAngle(GPLabError):
    pass


class InvalidN(GPLabError):
    pass


class MethodMismatch(GPLabError):
    """Requested intrinsic-volume method is not valid for the given ell."""


class RejectionBudgetExceeded(GPLabError):
    pass


class ConstructionFailure(GPLabError):
    """A scaffold object could not be built at the requested constants."""


class NonPositiveValue(GPLabError):
    pass


class TooFewSamples(GPLabError):
    pass


class DegenerateSample(GPLabError):
    """Sample has zero spread, so standardisation is undefined."""


class ConfigError(GPLabError):
    pass
