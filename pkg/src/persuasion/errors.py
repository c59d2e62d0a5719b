"""Exception hierarchy shared by all solver modules."""


class PersuasionError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(PersuasionError):
    """An input value violates a documented invariant."""


class DimensionError(ValidationError):
    """Array shapes disagree along a named axis."""

    def __init__(self, axis: str, expected, got):
        self.axis = axis
        self.expected = expected
        self.got = got
        super().__init__(f"dimension mismatch on {axis}: expected {expected}, got {got}")


class InstanceTooLargeError(PersuasionError):
    """A product expansion would exceed the configured state cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"instance too large: {size} states exceeds cap of {cap}")


class InfeasibleReducedFormError(PersuasionError):
    """A requested reduced form fails the realizability inequalities."""

    def __init__(self, violating_set):
        self.violating_set = tuple(violating_set)
        super().__init__(
            f"reduced form is not realizable; violating type set {self.violating_set}"
        )


class SolverError(PersuasionError):
    """The LP engine could not certify a solution (numerical failure)."""


class FileFormatError(PersuasionError):
    """An instance or scheme file is malformed; message names field or line."""
