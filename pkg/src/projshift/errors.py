"""Exception hierarchy shared by every module."""


class ShiftError(Exception):
    """Base class for all errors raised by projshift."""


class DimensionError(ShiftError):
    pass


class InvalidWindow(ShiftError):
    pass


class InvalidShape(ShiftError):
    pass


class InvalidSubgroup(ShiftError):
    pass


class InvalidPattern(ShiftError):
    pass


class CapacityError(ShiftError):
    """An enumeration would exceed the configured cell, state or pattern limits."""


class EmptySystem(ShiftError):
    """The shift has no points (its entropy would be -inf)."""


class EmptySystemWarning(UserWarning):
    pass


class UnsupportedInteraction(ShiftError):
    pass


class IncompleteFamily(ShiftError):
    pass


class InternalError(ShiftError):
    pass


class SpecError(ShiftError):
    """A system-spec file failed validation; ``path`` is a JSON pointer."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path or '/'}: {message}")
