"""Exception types shared across the library."""


class VhkError(Exception):
    """Base class for all library errors."""


class DimensionCapError(VhkError):
    """Dimension exceeds the supported cap (enumerations are 2^n-sized)."""


class SpaceMismatchError(VhkError):
    """A value does not belong to the value space it was used with."""


class EmptySumError(VhkError):
    """Semigroup sum of an empty sequence (there is no zero element)."""


class CompactnessError(VhkError):
    """The value space declares no sequential-compactness support."""


class BoundednessError(VhkError):
    """Boundedness surrogate failed (diameter or variation cap exceeded)."""


class DegenerateRectangleError(VhkError):
    """A sub-rectangle is degenerate where a non-degenerate one is required."""


class GridMismatchError(VhkError):
    """Two objects built over different grids or rectangles were combined."""


class EnumerationCapError(VhkError):
    """Exhaustive enumeration would exceed the configured cap."""


class CertificationError(VhkError):
    """An internal certificate of a selection run failed to hold."""


class DegenerateDualsError(VhkError):
    """The supplied dual functionals do not form a basis."""


class ConvergenceError(VhkError):
    """Pointwise-convergence verification failed."""

    def __init__(self, message: str, worst_node=None, residual=None):
        super().__init__(message)
        self.worst_node = worst_node
        self.residual = residual


class DocumentError(VhkError):
    """Malformed input document; ``code`` names the violated constraint."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class ExpressionError(DocumentError):
    """A sequence-specification expression failed to parse or validate."""

    def __init__(self, message: str):
        super().__init__("bad-expression", message)
