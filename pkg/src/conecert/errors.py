class ConecertError(Exception):
    """Base class for errors raised by conecert."""


class DimensionError(ConecertError, ValueError):
    """Operands live in spaces of different dimension."""


class DegenerateConeError(ConecertError, ValueError):
    """A cone is not pointed, has an empty interior, or has a zero generator."""


class InstanceError(ConecertError, ValueError):
    """An instance or instance file is malformed.

    ``field`` names the offending part of the input, e.g. ``points[3].g[1]``.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
