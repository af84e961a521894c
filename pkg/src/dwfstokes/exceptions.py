"""Error hierarchy shared by the library and the CLI exit-code mapping."""


class DwfStokesError(Exception):
    """Base class for every error raised by dwfstokes."""


class FieldError(DwfStokesError, ValueError):
    """Bad degree or modulus, element out of range, zero inverse, dependent basis."""


class GeometryError(DwfStokesError, ValueError):
    """Invalid degree, striation, line or net index."""


class DimensionError(DwfStokesError, ValueError):
    """Shape mismatch between a state and a transform or operator set."""


class InvariantError(DwfStokesError, ValueError):
    """A state or operator violates its documented invariant."""


class ConstructionError(DwfStokesError, RuntimeError):
    """Internal consistency failure; signals a bug rather than bad input."""


class UsageError(DwfStokesError, ValueError):
    """A command was invoked with missing or contradictory arguments."""
