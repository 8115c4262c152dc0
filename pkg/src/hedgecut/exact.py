"""Exact minimum-cost edge removal for identifiability.

The search removes one edge of the current maximal hedge at a time and
recurses on that hedge, carrying two running bounds: an upper bound that
tightens whenever a cheaper solution is found, and a threshold below
which a solution is good enough to stop.  With the default threshold of
zero and an infinite upper bound the search is exhaustive over the part
of the lattice that can matter, so the returned cost is the global
optimum.  Edges explored at one node are priced at infinity for the
rest of that node's subtree, which stops the same removal set from
being enumerated twice.

A brute-force oracle over subsets of the maximal hedge's finite-weight
edges is provided for cross-checking on small instances.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .admg import Admg, Edge, _adjacency, _bits, _districts_m, _mh_m
from .errors import EmptySet, Infeasible, InvalidBounds, TooLarge, UnknownEdge
from .probmodel import Objective, ProbabilisticAdmg, WeightedInstance, score_solution, to_edge_id_weights

INF = math.inf

ORACLE_EDGE_LIMIT = 24


@dataclass(frozen=True)
class Solution:
    """Outcome of a removal search.

    cost is the sum of the removed edges' weights when identifiable,
    infinite otherwise.  kept_graph is the input graph without the
    removed edges; score is filled in by probability-aware callers.
    timed_out marks a search cut short by its deadline, in which case
    the solution is merely the best one seen so far.
    """

    removed: frozenset[Edge]
    cost: float
    identifiable: bool
    kept_graph: Admg
    score: float | None = None
    timed_out: bool = False


@dataclass(frozen=True)
class ExclusionConstraint:
    """Requires any acceptable solution to remove at least one listed edge."""

    must_intersect: frozenset[Edge]

    def __post_init__(self):
        object.__setattr__(self, "must_intersect", frozenset(self.must_intersect))
        if not self.must_intersect:
            raise EmptySet("constraint with no edges")


def _mh_state(n: int, edges: frozenset[Edge], y_mask: int):
    """Maximal-hedge mask plus the edges living inside it."""
    pa, bi = _adjacency(n, edges)
    hull = _mh_m(pa, bi, y_mask, (1 << n) - 1)
    inside = frozenset(
        e for e in edges if (1 << e.u) & hull and (1 << e.v) & hull
    )
    return hull, inside


class _Search:
    def __init__(
        self,
        n: int,
        y_mask: int,
        deadline: float | None,
        constraints: Sequence[frozenset[Edge]],
    ):
        self.n = n
        self.y_mask = y_mask
        self.deadline = deadline
        self.constraints = tuple(constraints)
        self.expired = False

    def _out_of_time(self) -> bool:
        if self.expired:
            return True
        if self.deadline is not None and time.monotonic() >= self.deadline:
            self.expired = True
        return self.expired

    def run(
        self,
        edges: frozenset[Edge],
        weights: dict[Edge, float],
        removed: frozenset[Edge],
        spent: tuple[float, ...],
        ub: float,
        th: float,
    ) -> tuple[bool, frozenset[Edge], float]:
        """Best removal set for the subproblem, within the bounds.

        spent holds the root-instance weights of `removed`; bounds and
        the returned cost are whole-path totals, computed with fsum so a
        caller-supplied bound taken from another solver's cost for the
        same edge set compares equal instead of drifting by rounding.
        On deadline expiry every level returns its best-so-far, which
        composes to a valid (possibly suboptimal) solution at the root.
        """
        hull, hedge_edges = _mh_state(self.n, edges, self.y_mask)
        unmet = [c for c in self.constraints if not (c & removed)]
        if hull == self.y_mask and not unmet:
            return True, frozenset(), math.fsum(spent)

        pool = set(hedge_edges) if hull != self.y_mask else set()
        if unmet:
            for c in unmet:
                pool |= c & edges
        candidates = sorted(pool, key=lambda e: (weights[e], e))

        found = False
        best_set: frozenset[Edge] = frozenset()
        best_cost = INF
        # weights is owned by this call; every caller hands over a copy,
        # so pricing an explored edge at infinity stays local to this
        # subtree while still reaching the deeper branches.
        for e in candidates:
            if self._out_of_time():
                break
            w = weights[e]
            if w == INF or math.fsum((*spent, w)) > ub:
                break
            sub_found, sub_set, sub_cost = self.run(
                edges - {e}, dict(weights), removed | {e}, (*spent, w), ub, th
            )
            if sub_found:
                found = True
                best_set = sub_set | {e}
                best_cost = sub_cost
                ub = sub_cost
                if ub <= th:
                    break
            weights[e] = INF
        return found, best_set, best_cost


def _validated_bounds(upper_bound: float, threshold: float):
    if math.isnan(upper_bound) or math.isnan(threshold):
        raise InvalidBounds("bounds may not be NaN")
    if threshold > upper_bound:
        raise InvalidBounds(
            f"threshold {threshold} exceeds upper bound {upper_bound}"
        )


def _solve(
    inst: WeightedInstance,
    constraints: Sequence[ExclusionConstraint],
    upper_bound: float,
    threshold: float,
    deadline: float | None,
) -> Solution:
    _validated_bounds(upper_bound, threshold)
    every = inst.graph.directed_edges | inst.graph.bidirected_edges
    constraint_sets = []
    for c in constraints:
        foreign = c.must_intersect - every
        if foreign:
            raise UnknownEdge(f"constraint over foreign edges: {sorted(foreign)}")
        if all(inst.weights[e] == INF for e in c.must_intersect):
            raise Infeasible(
                "constraint can only be met by removing an infinite-weight edge"
            )
        constraint_sets.append(c.must_intersect)

    y_mask = 0
    for v in inst.target:
        y_mask |= 1 << v
    search = _Search(inst.graph.n, y_mask, deadline, constraint_sets)
    found, removed, cost = search.run(
        frozenset(every), dict(inst.weights), frozenset(), (), upper_bound, threshold
    )
    if not found:
        return Solution(frozenset(), INF, False, inst.graph, timed_out=search.expired)
    return Solution(
        removed,
        cost,
        True,
        inst.graph.remove_edges(removed),
        timed_out=search.expired,
    )


def edge_id_exact(
    inst: WeightedInstance,
    upper_bound: float = INF,
    threshold: float = 0.0,
    *,
    deadline: float | None = None,
) -> Solution:
    """Minimum-weight edge set whose removal makes the target identifiable.

    Solutions costing more than upper_bound are not searched for; any
    solution at or below threshold is accepted immediately.  deadline is
    an absolute time.monotonic() value polled between branch expansions;
    when it passes, the best solution found so far is returned.
    """
    return _solve(inst, (), upper_bound, threshold, deadline)


def edge_id_exact_constrained(
    inst: WeightedInstance,
    constraints: Sequence[ExclusionConstraint],
    upper_bound: float = INF,
    threshold: float = 0.0,
    *,
    deadline: float | None = None,
) -> Solution:
    """Exact search that must additionally hit every exclusion constraint.

    Constraint edges join the branching pool even when they sit outside
    the maximal hedge, since removing one may be the cheapest way to
    satisfy its constraint.
    """
    return _solve(inst, tuple(constraints), upper_bound, threshold, deadline)


def _identifiable_edges(n: int, edges: Iterable[Edge], y_mask: int) -> bool:
    pa, bi = _adjacency(n, edges)
    full = (1 << n) - 1
    return all(
        _mh_m(pa, bi, part, full) == part for part in _districts_m(bi, y_mask)
    )


def is_feasible(inst: WeightedInstance) -> bool:
    """Whether removing every finite-weight edge yields identifiability."""
    y_mask = 0
    for v in inst.target:
        y_mask |= 1 << v
    every = inst.graph.directed_edges | inst.graph.bidirected_edges
    kept = [e for e in every if inst.weights[e] == INF]
    return _identifiable_edges(inst.graph.n, kept, y_mask)


def oracle_solve(inst: WeightedInstance) -> Solution:
    """Brute force over subsets of the maximal hedge's finite-weight edges.

    Ties break toward fewer edges, then lexicographically smaller edge
    tuples.  Guarded at ORACLE_EDGE_LIMIT finite edges.
    """
    y_mask = 0
    for v in inst.target:
        y_mask |= 1 << v
    n = inst.graph.n
    every = inst.graph.directed_edges | inst.graph.bidirected_edges
    _, hedge_edges = _mh_state(n, frozenset(every), y_mask)
    finite = sorted(e for e in hedge_edges if inst.weights[e] < INF)
    if len(finite) > ORACLE_EDGE_LIMIT:
        raise TooLarge(f"{len(finite)} finite hedge edges exceed the oracle guard")

    best: tuple[float, int, tuple[Edge, ...]] | None = None
    best_removed: frozenset[Edge] | None = None
    for bits in range(1 << len(finite)):
        removed = [finite[i] for i in range(len(finite)) if bits >> i & 1]
        key = (
            math.fsum(inst.weights[e] for e in removed),
            len(removed),
            tuple(sorted(removed)),
        )
        if best is not None and key >= best:
            continue
        if _identifiable_edges(n, every - set(removed), y_mask):
            best = key
            best_removed = frozenset(removed)
    if best_removed is None:
        raise Infeasible("no subset of finite-weight edges yields identifiability")
    return Solution(
        best_removed,
        best[0],
        True,
        inst.graph.remove_edges(best_removed),
    )


def rank_top_n(
    pg: ProbabilisticAdmg,
    target: Iterable[int],
    objective: Objective,
    n: int,
) -> list[Solution]:
    """Best n removal solutions in non-increasing score order.

    After each solution the kept finite-weight edges become an exclusion
    constraint, so every later solution differs from each earlier one.
    Stops early once no further solution exists.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    inst = to_edge_id_weights(pg, objective, target)
    finite = inst.finite_edges()
    out: list[Solution] = []
    constraints: list[ExclusionConstraint] = []
    for _ in range(n):
        try:
            sol = _solve(inst, tuple(constraints), INF, 0.0, None)
        except Infeasible:
            break
        if not sol.identifiable:
            break
        out.append(replace(sol, score=score_solution(pg, sol.removed, objective)))
        kept_finite = finite - sol.removed
        if not kept_finite:
            break
        constraints.append(ExclusionConstraint(kept_finite))
    return out
