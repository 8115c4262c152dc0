"""Exception types shared across the package."""


class HedgecutError(Exception):
    """Base class for every error raised by this package."""


class CycleDetected(HedgecutError):
    """The directed part of a mixed graph contains a cycle."""


class UnknownVertex(HedgecutError):
    """A vertex index or label does not belong to the graph."""


class UnknownEdge(HedgecutError):
    """An edge does not belong to the graph under discussion."""


class NotADistrict(HedgecutError):
    """The supplied vertex set is not a single bidirected-connected block."""


class OverlappingSets(HedgecutError):
    """Two vertex sets that must be disjoint overlap."""


class EmptyTarget(HedgecutError):
    """A target vertex set is empty."""


class EmptySet(HedgecutError):
    """A set argument that must be non-empty is empty."""


class InvalidBounds(HedgecutError):
    """Search bounds are inconsistent (threshold above the upper bound)."""


class TooLarge(HedgecutError):
    """The instance exceeds the size guard of a brute-force routine."""


class Infeasible(HedgecutError):
    """No finite-cost solution exists."""


class GenerationExhausted(HedgecutError):
    """Random instance generation hit its rejection limit."""


class ParseError(HedgecutError):
    """A graph file could not be parsed."""
