"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the allowed domain."""


class DimensionError(ParameterError):
    """Vector or matrix shapes do not agree."""


class ContractError(ValueError):
    """An input violates a structural precondition of the operation."""


class ResourceError(RuntimeError):
    """An exhaustive enumeration would exceed its size cap."""
