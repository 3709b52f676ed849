"""Exception hierarchy shared by every unitdist module."""

from __future__ import annotations


class UnitDistanceError(Exception):
    """Base class for all errors raised by unitdist."""


class PreconditionViolated(UnitDistanceError, ValueError):
    """An operation was called with arguments outside its contract."""


class ParseError(UnitDistanceError, ValueError):
    """A graph, coloring or coordinate file is malformed."""


class MissingVertex(UnitDistanceError, KeyError):
    """A graph vertex has no coordinates in an embedding."""


# ---------------------------------------------------------------------------
# Input outside a construction's hypothesis (CLI exit code 2)
# ---------------------------------------------------------------------------


class HypothesisNotMet(UnitDistanceError):
    """The input graph does not satisfy the hypothesis of a construction."""


class K33Excluded(HypothesisNotMet):
    pass


class TooManyEdges(HypothesisNotMet):
    pass


class ForbiddenSubgraphForSphere(HypothesisNotMet):
    pass


class NotDegenerate(HypothesisNotMet):
    pass


class StrategyNotApplicable(HypothesisNotMet):
    """An explicitly chosen construction cannot run on this input or in this mode."""


class NoApplicableTheorem(HypothesisNotMet):
    """No implemented construction covers the input."""

    def __init__(self, message: str, reasons: dict[str, str] | None = None):
        super().__init__(message)
        self.reasons = reasons or {}


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


class GeometryError(UnitDistanceError):
    pass


class FullSpan(GeometryError):
    """The orthogonal complement is the zero subspace."""


class DegenerateSpan(GeometryError):
    """A point set spans fewer affine dimensions than required."""


class NotOnSphere(GeometryError):
    pass


# ---------------------------------------------------------------------------
# Construction failures (bug signals or exhausted randomness)
# ---------------------------------------------------------------------------


class ConstructionFailed(UnitDistanceError, RuntimeError):
    pass


class ResampleExceeded(ConstructionFailed):
    pass


class InternalAssertionFailed(ConstructionFailed):
    pass


class UnreachableByTheorem(ConstructionFailed):
    """A branch that the edge bound rules out was reached."""


class DidNotDecide(ConstructionFailed):
    """A backtracking search hit its node cap."""
