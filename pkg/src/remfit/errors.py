"""Exception taxonomy for the package.

Every error carries an ``exit_code`` used by the CLI: 2 for input or
configuration problems, 3 for numerical failures.
"""


class RemError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class OrderingError(RemError):
    """Event rows are not ordered by their first column."""


class SimultaneityError(RemError):
    """Two events share an exact timestamp (or a waiting time is nonpositive)."""


class IdRangeError(RemError):
    """An actor identifier falls outside 1..n (file) or 0..n-1 (memory)."""


class MissingValueError(RemError):
    """A required value is missing or non-finite."""


class ShapeError(RemError):
    """An array has dimensions inconsistent with the bound history."""


class UnknownEffectError(RemError):
    """An effect name is not in the catalog."""


class BindingError(RemError):
    """A covariate effect was declared without a matching covariate array."""


class SupportError(RemError):
    """An event lies outside the dyadic support (for example a self-loop)."""


class ParameterError(RemError):
    """A parameter vector or option value is invalid."""


class ComparabilityError(RemError):
    """Two fits do not share the same underlying history."""


class UnsupportedFeature(RemError):
    """A declared feature is recognized but intentionally not evaluated."""


class NumericalRangeError(RemError):
    """A hazard total overflowed or underflowed the floating range."""

    exit_code = 3


class ConvergenceError(RemError):
    """The optimizer failed to reach the gradient tolerance.

    Carries the best iterate as a full FitResult in ``result`` so callers
    can still inspect or persist it.
    """

    exit_code = 3

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


#: Name -> class, used to rehydrate errors that crossed the service boundary.
BY_NAME = {
    cls.__name__: cls
    for cls in (
        RemError,
        OrderingError,
        SimultaneityError,
        IdRangeError,
        MissingValueError,
        ShapeError,
        UnknownEffectError,
        BindingError,
        SupportError,
        ParameterError,
        ComparabilityError,
        UnsupportedFeature,
        NumericalRangeError,
        ConvergenceError,
    )
}
