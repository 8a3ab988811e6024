"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for all errors raised by gnatural."""


class DomainError(GeometryError, ValueError):
    """A point lies outside the declared chart domain."""


class OrderError(GeometryError, ValueError):
    """A derivative deeper than the supported cap was requested."""


class SingularMetricError(GeometryError, ArithmeticError):
    """The metric matrix is numerically singular at the requested point."""


class ParamError(GeometryError, ValueError):
    """Invalid construction parameters (g-natural constants, catalog knobs)."""


class DimensionMismatchError(GeometryError, ValueError):
    """Tensors passed together do not share a dimension."""


class UnknownEntryError(GeometryError, KeyError):
    """Requested catalog entry does not exist."""
