"""Exception types raised across the package."""


class DistinctAnglesError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(DistinctAnglesError, ValueError):
    pass


class InvalidInput(DistinctAnglesError, ValueError):
    pass


class DimensionMismatch(DistinctAnglesError, ValueError):
    pass


class IndexOutOfRange(DistinctAnglesError, IndexError):
    pass


class TooLarge(DistinctAnglesError):
    """An enumeration would exceed its configured cap."""


class DegenerateAngle(DistinctAnglesError, ValueError):
    """The angle is 0 or pi (coincident or collinear points)."""


class DegenerateTriple(DistinctAnglesError):
    """A collinear triple was met by a strict census."""

    def __init__(self, triple, message=None):
        self.triple = tuple(triple)
        super().__init__(message or f"collinear triple at indices {self.triple}")


class RetriesExhausted(DistinctAnglesError):
    def __init__(self, attempts, witness, message=None):
        self.attempts = attempts
        self.witness = witness
        super().__init__(
            message or f"no admissible projection after {attempts} attempts; last failure: {witness}"
        )


class NoQuadruplesFound(DistinctAnglesError):
    pass


class WitnessDiscrepancyTooLarge(DistinctAnglesError):
    """Angles that must agree exactly differ by more than the tolerance.

    This points at insufficient working precision, never at the geometry.
    """
