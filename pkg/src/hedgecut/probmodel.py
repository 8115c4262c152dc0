"""Edge-probability model over ADMGs and its reduction to edge weights.

Each edge exists independently with its own probability, so a candidate
subgraph has probability

    P(G_s) = prod_{e in G_s} p_e * prod_{e not in G_s} (1 - p_e)

and the plausibility of keeping a subgraph (no edge outside it exists)
is the second product alone.  Both objectives supported by the solvers
reduce to additive non-negative edge weights:

  * most probable subgraph: w_e = max(0, log-odds of p_e), so removing
    an edge with p_e > 1/2 costs its log-odds and edges below 1/2 are
    free to drop;
  * most plausible removal: w_e = -log(1 - p_e).

Edges with p_e = 1 map to an infinite weight under both objectives and
can never be removed.  Natural logarithms throughout; probabilities are
accumulated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .admg import Admg, Edge
from .errors import EmptyTarget, UnknownEdge, UnknownVertex

INF = math.inf


class Objective(Enum):
    MOST_PROBABLE = "most-probable"
    MOST_PLAUSIBLE = "most-plausible"
    RAW_WEIGHTS = "weights"


@dataclass(frozen=True)
class ProbabilisticAdmg:
    """An ADMG whose edges carry existence probabilities in [0, 1].

    File ingestion drops probability-zero edges before construction;
    the inverse weight maps may still produce them programmatically.
    """

    graph: Admg
    prob: Mapping[Edge, float]

    def __post_init__(self):
        want = self.graph.directed_edges | self.graph.bidirected_edges
        have = set(self.prob)
        if have != want:
            raise UnknownEdge(
                f"probabilities must cover the edge set exactly; "
                f"missing {sorted(want - have)}, extra {sorted(have - want)}"
            )
        for e, p in self.prob.items():
            if not (0.0 <= p <= 1.0) or math.isnan(p):
                raise ValueError(f"probability of {e} out of range: {p}")
        object.__setattr__(self, "prob", dict(self.prob))

    def edge_probability(self, e: Edge) -> float:
        try:
            return self.prob[e]
        except KeyError:
            raise UnknownEdge(f"not an edge of this graph: {e}") from None


@dataclass(frozen=True)
class WeightedInstance:
    """An ADMG with non-negative removal weights and a target vertex set."""

    graph: Admg
    weights: Mapping[Edge, float]
    target: frozenset[int]

    def __post_init__(self):
        want = self.graph.directed_edges | self.graph.bidirected_edges
        have = set(self.weights)
        if have != want:
            raise UnknownEdge(
                f"weights must cover the edge set exactly; "
                f"missing {sorted(want - have)}, extra {sorted(have - want)}"
            )
        for e, w in self.weights.items():
            if math.isnan(w) or w < 0.0:
                raise ValueError(f"weight of {e} must be non-negative, got {w}")
        tgt = frozenset(self.target)
        if not tgt:
            raise EmptyTarget("target is empty")
        for v in tgt:
            if v < 0 or v >= self.graph.n:
                raise UnknownVertex(f"target vertex {v} out of range")
        object.__setattr__(self, "weights", dict(self.weights))
        object.__setattr__(self, "target", tgt)

    def finite_edges(self) -> frozenset[Edge]:
        return frozenset(e for e, w in self.weights.items() if w < INF)


def subgraph_probability(pg: ProbabilisticAdmg, kept: Iterable[Edge]) -> float:
    """Probability that exactly the kept edges exist."""
    kept = frozenset(kept)
    every = pg.graph.directed_edges | pg.graph.bidirected_edges
    foreign = kept - every
    if foreign:
        raise UnknownEdge(f"not edges of this graph: {sorted(foreign)}")
    total = 0.0
    for e in sorted(every):
        p = pg.prob[e] if e in kept else 1.0 - pg.prob[e]
        if p == 0.0:
            return 0.0
        total += math.log(p)
    return math.exp(total)


def plausibility(pg: ProbabilisticAdmg, kept: Iterable[Edge]) -> float:
    """Probability that no edge outside the kept set exists."""
    kept = frozenset(kept)
    every = pg.graph.directed_edges | pg.graph.bidirected_edges
    foreign = kept - every
    if foreign:
        raise UnknownEdge(f"not edges of this graph: {sorted(foreign)}")
    total = 0.0
    for e in sorted(every - kept):
        q = 1.0 - pg.prob[e]
        if q == 0.0:
            return 0.0
        total += math.log(q)
    return math.exp(total)


def _weight(p: float, objective: Objective) -> float:
    if objective is Objective.MOST_PROBABLE:
        if p >= 1.0:
            return INF
        if p <= 0.0:
            return 0.0
        return max(0.0, math.log(p) - math.log1p(-p))
    if objective is Objective.MOST_PLAUSIBLE:
        if p >= 1.0:
            return INF
        return -math.log1p(-p)
    raise ValueError(f"no weight map for objective {objective}")


def _probability(w: float, objective: Objective) -> float:
    if objective is Objective.MOST_PROBABLE:
        if w == INF:
            return 1.0
        return 1.0 / (1.0 + math.exp(-w))
    if objective is Objective.MOST_PLAUSIBLE:
        if w == INF:
            return 1.0
        return -math.expm1(-w)
    raise ValueError(f"no probability map for objective {objective}")


def to_edge_id_weights(
    pg: ProbabilisticAdmg, objective: Objective, target: Iterable[int]
) -> WeightedInstance:
    """Weighted removal instance whose optimum realises the objective."""
    weights = {e: _weight(p, objective) for e, p in pg.prob.items()}
    return WeightedInstance(pg.graph, weights, frozenset(target))


def from_edge_id_weights(inst: WeightedInstance, objective: Objective) -> ProbabilisticAdmg:
    """Inverse of the weight map; composing the two is the identity on weights."""
    prob = {e: _probability(w, objective) for e, w in inst.weights.items()}
    return ProbabilisticAdmg(inst.graph, prob)


def score_solution(
    pg: ProbabilisticAdmg, removed: Iterable[Edge], objective: Objective
) -> float:
    """Objective value achieved by deleting the removed edges.

    Under the most-probable objective the surviving below-half
    probability edges are additionally dropped (they only lower the
    subgraph probability and their removal costs nothing), so the score
    is taken over the subgraph without them.
    """
    removed = frozenset(removed)
    every = pg.graph.directed_edges | pg.graph.bidirected_edges
    foreign = removed - every
    if foreign:
        raise UnknownEdge(f"not edges of this graph: {sorted(foreign)}")
    kept = every - removed
    if objective is Objective.MOST_PROBABLE:
        kept = frozenset(e for e in kept if pg.prob[e] >= 0.5)
        return subgraph_probability(pg, kept)
    if objective is Objective.MOST_PLAUSIBLE:
        return plausibility(pg, kept)
    raise ValueError(f"no score defined for objective {objective}")


def free_drops(pg: ProbabilisticAdmg, removed: Iterable[Edge]) -> frozenset[Edge]:
    """Surviving edges a most-probable report drops at zero cost."""
    kept = (pg.graph.directed_edges | pg.graph.bidirected_edges) - frozenset(removed)
    return frozenset(e for e in kept if pg.prob[e] < 0.5)
