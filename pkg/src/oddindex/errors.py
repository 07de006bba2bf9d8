"""Exception hierarchy shared by all modules."""

from contextlib import contextmanager

__all__ = [
    "IndexTheoryError",
    "SizeError",
    "ParityError",
    "GapAmbiguityError",
    "SymmetryError",
    "ConventionError",
    "DiagramError",
    "ConstructionError",
    "UnsupportedGeometryError",
    "LiftInconsistencyError",
    "SplittingConsistencyError",
    "ConsistencyError",
    "ScalingError",
    "InvalidProblemError",
    "DiscretizationWarning",
    "stage",
]


class IndexTheoryError(Exception):
    """Base class. ``stage`` is filled in by the verification pipelines."""

    stage = None

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class SizeError(IndexTheoryError, ValueError):
    pass


class ParityError(IndexTheoryError, ValueError):
    pass


class GapAmbiguityError(IndexTheoryError):
    """Singular values sit too close to the rank threshold to call the rank.

    Attributes
    ----------
    values : ndarray
        The offending singular values.
    threshold : float
        The threshold that was in use.
    """

    def __init__(self, values, threshold):
        self.values = values
        self.threshold = threshold
        super().__init__(
            f"ambiguous rank: singular values {list(values)} lie within a "
            f"factor 10 of threshold {threshold:.3e}"
        )


class SymmetryError(IndexTheoryError, ValueError):
    pass


class ConventionError(IndexTheoryError):
    pass


class DiagramError(IndexTheoryError, ValueError):
    pass


class ConstructionError(IndexTheoryError):
    pass


class UnsupportedGeometryError(IndexTheoryError, ValueError):
    pass


class LiftInconsistencyError(IndexTheoryError):
    pass


class SplittingConsistencyError(IndexTheoryError):
    pass


class ConsistencyError(IndexTheoryError):
    pass


class ScalingError(IndexTheoryError):
    pass


class InvalidProblemError(IndexTheoryError, ValueError):
    pass


class DiscretizationWarning(UserWarning):
    pass


@contextmanager
def stage(name):
    """Tag any library error raised inside the block with a stage label."""
    try:
        yield
    except IndexTheoryError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
