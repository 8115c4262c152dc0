"""Minimum-cost intervention instances and reductions to and from edge removal.

An intervention instance asks for a cheapest vertex set whose
intervention makes the query on the target identifiable.  The two
problems reduce to each other:

  * mcip_to_edge_id splits every interventionable vertex x into a
    top copy x2 and bottom copy x1, joined by a bidirected marker edge
    priced at x's cost plus a directed edge x2 -> x1.  Bidirected edges
    move to the top layer, directed edges to the bottom layer, and
    everything except the markers is priced infinite, so removing the
    marker of x is exactly as good as intervening on x.
  * edge_id_to_mcip gives every edge a representative vertex priced at
    the edge's weight and wires it so that intervening on the
    representative mimics deleting the edge, while original vertices
    cost infinity.  Pairs of target vertices get an auxiliary chain
    that preserves cross-district hedges of the target.

add_negative_correlation_gadget grafts a structure onto an intervention
instance that forces any finite-cost solution to intervene on at least
one vertex of a chosen set, which is how edge exclusion constraints
ride through the reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .admg import (
    Admg,
    Edge,
    EdgeKind,
    _adjacency,
    _bits,
    _identifiable_m,
)
from .errors import EmptySet, EmptyTarget, Infeasible, UnknownVertex
from .exact import ExclusionConstraint, Solution, edge_id_exact
from .heuristics import HeuristicSolution, heid1, heid2
from .probmodel import WeightedInstance

INF = math.inf


@dataclass(frozen=True)
class McipInstance:
    """ADMG with per-vertex intervention costs and a target set."""

    graph: Admg
    cost: Mapping[int, float]
    target: frozenset[int]

    def __post_init__(self):
        n = self.graph.n
        if set(self.cost) != set(range(n)):
            raise UnknownVertex("costs must cover the vertex range exactly")
        for v, c in self.cost.items():
            if math.isnan(c) or c < 0.0:
                raise ValueError(f"cost of vertex {v} must be non-negative, got {c}")
        tgt = frozenset(self.target)
        if not tgt:
            raise EmptyTarget("target is empty")
        for v in tgt:
            if v < 0 or v >= n:
                raise UnknownVertex(f"target vertex {v} out of range")
        object.__setattr__(self, "cost", dict(self.cost))
        object.__setattr__(self, "target", tgt)


@dataclass(frozen=True)
class EdgeVertexMap:
    """How edge_id_to_mcip represented each edge, and the vertex layers."""

    forward: Mapping[Edge, int]
    backward: Mapping[int, Edge]
    top: frozenset[int]
    bot: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "forward", dict(self.forward))
        object.__setattr__(self, "backward", dict(self.backward))


def intervened_graph(g: Admg, vertices: Iterable[int]) -> Admg:
    """Graph after do-interventions: incoming directed edges and all
    incident bidirected edges of the intervened vertices are deleted."""
    cut = g._check_vertices(vertices)
    drop = {e for e in g.directed_edges if (1 << e.v) & cut}
    drop |= {
        e for e in g.bidirected_edges if (1 << e.u) & cut or (1 << e.v) & cut
    }
    return g.remove_edges(drop)


def mcip_to_edge_id(m: McipInstance) -> tuple[WeightedInstance, dict[int, Edge]]:
    """Edge-removal instance equivalent to the intervention instance.

    Returns the instance plus a map sending each interventionable
    vertex to its finite-weight marker edge.
    """
    g = m.graph
    target = m.target
    labels: list[str] = []
    bot_of: dict[int, int] = {}
    top_of: dict[int, int] = {}
    for v in range(g.n):
        if v in target:
            bot_of[v] = top_of[v] = len(labels)
            labels.append(g.labels[v])
        else:
            bot_of[v] = len(labels)
            labels.append(f"{g.labels[v]}^1")
            top_of[v] = len(labels)
            labels.append(f"{g.labels[v]}^2")

    directed: list[Edge] = []
    bidirected: list[Edge] = []
    weights: dict[Edge, float] = {}
    marker: dict[int, Edge] = {}
    for v in range(g.n):
        if v in target:
            continue
        mk = Edge.bidirected(top_of[v], bot_of[v])
        bidirected.append(mk)
        weights[mk] = m.cost[v]
        marker[v] = mk
        e = Edge.directed(top_of[v], bot_of[v])
        directed.append(e)
        weights[e] = INF
    for e in sorted(g.directed_edges):
        # edges out of a target vertex must survive: with a multi-district
        # target they can carry the ancestor path of another district's hedge
        lifted = Edge.directed(bot_of[e.u], bot_of[e.v])
        directed.append(lifted)
        weights[lifted] = INF
    for e in sorted(g.bidirected_edges):
        # Non-target endpoints go to their top copy; target vertices
        # have a single copy, so target-internal edges come over as-is.
        lifted = Edge.bidirected(top_of[e.u], top_of[e.v])
        bidirected.append(lifted)
        weights[lifted] = INF

    image = Admg(labels, directed, bidirected)
    inst = WeightedInstance(
        image, weights, frozenset(top_of[v] for v in target)
    )
    return inst, marker


def edge_id_to_mcip(inst: WeightedInstance) -> tuple[McipInstance, EdgeVertexMap]:
    """Intervention instance equivalent to the edge-removal instance."""
    g = inst.graph
    target = inst.target
    labels: list[str] = list(g.labels)
    cost: dict[int, float] = {v: INF for v in range(g.n)}
    directed: list[Edge] = []
    bidirected: list[Edge] = []
    forward: dict[Edge, int] = {}
    new_target = set(target)

    def case_prefix(e: Edge) -> str:
        inside = (e.u in target) + (e.v in target)
        return ("x", "z", "y")[inside]

    def fresh(label: str, c: float) -> int:
        idx = len(labels)
        labels.append(label)
        cost[idx] = c
        return idx

    for e in sorted(g.directed_edges):
        rep = fresh(f"{case_prefix(e)}:d{e.u}.{e.v}", inst.weights[e])
        forward[e] = rep
        directed.append(Edge.directed(e.u, rep))
        directed.append(Edge.directed(rep, e.v))
        bidirected.append(Edge.bidirected(e.u, rep))

    x_vertices = [v for v in range(g.n) if v not in target]
    for e in sorted(g.bidirected_edges):
        prefix = case_prefix(e)
        if prefix == "z":
            x_end = e.u if e.v in target else e.v
            y_end = e.v if e.v in target else e.u
            rep = fresh(f"z:b{x_end}.{y_end}", inst.weights[e])
            forward[e] = rep
            bidirected.append(Edge.bidirected(rep, x_end))
            bidirected.append(Edge.bidirected(rep, y_end))
            directed.append(Edge.directed(rep, x_end))
        else:
            rep = fresh(f"{prefix}:b{e.u}.{e.v}", inst.weights[e])
            forward[e] = rep
            bidirected.append(Edge.bidirected(rep, e.u))
            bidirected.append(Edge.bidirected(rep, e.v))
            if prefix == "x":
                directed.append(Edge.directed(rep, e.u))
                directed.append(Edge.directed(rep, e.v))
            else:
                for x in x_vertices:
                    directed.append(Edge.directed(rep, x))

    top_count = len(labels)

    # Target pairs get a bottom chain whose last vertex joins the target,
    # so a hedge touching several target vertices in the original graph
    # still shows up as a hedge after the rewrite.
    y_order = [v for v in g.topological_order() if v in target]
    pos_of = {v: k + 1 for k, v in enumerate(y_order)}
    for i in range(1, len(y_order) + 1):
        for j in range(i + 1, len(y_order) + 1):
            chain: dict[int, int] = {}
            for k in range(i, j + 1):
                yk = y_order[k - 1]
                chain[k] = fresh(f"y{k}@{i}.{j}", INF)
                directed.append(Edge.directed(yk, chain[k]))
            for k in range(i + 1, j):
                directed.append(Edge.directed(chain[k], chain[i]))
            directed.append(Edge.directed(chain[i], chain[j]))
            bidirected.append(Edge.bidirected(y_order[j - 1], chain[i]))
            new_target.add(chain[j])
            for e in sorted(g.bidirected_edges):
                if e.u in pos_of and e.v in pos_of:
                    k, l = pos_of[e.u], pos_of[e.v]
                    if i <= k <= j and i <= l <= j:
                        mirror = fresh(f"y:b{e.u}.{e.v}@{i}.{j}", INF)
                        bidirected.append(Edge.bidirected(mirror, chain[k]))
                        bidirected.append(Edge.bidirected(mirror, chain[l]))
                        directed.append(Edge.directed(mirror, forward[e]))

    image = Admg(labels, directed, bidirected)
    evmap = EdgeVertexMap(
        forward,
        {rep: e for e, rep in forward.items()},
        frozenset(range(top_count)),
        frozenset(range(top_count, len(labels))),
    )
    return McipInstance(image, cost, frozenset(new_target)), evmap


def mcip_solve(
    m: McipInstance,
    upper_bound: float = INF,
    threshold: float = 0.0,
    *,
    deadline: float | None = None,
) -> tuple[frozenset[int], float]:
    """Cheapest intervention set making the target identifiable.

    Solved through the edge-removal reduction; the result is verified
    against intervention semantics on the original instance.
    """
    inst, marker = mcip_to_edge_id(m)
    sol = edge_id_exact(inst, upper_bound, threshold, deadline=deadline)
    if not sol.identifiable:
        raise Infeasible("no finite-cost intervention set exists")
    chosen = frozenset(v for v, mk in marker.items() if mk in sol.removed)
    assert len(chosen) == len(sol.removed), "solver removed a non-marker edge"
    mutilated = intervened_graph(m.graph, chosen)
    pa, bi = _adjacency(m.graph.n, mutilated.directed_edges | mutilated.bidirected_edges)
    y_mask = 0
    for v in m.target:
        y_mask |= 1 << v
    assert _identifiable_m(pa, bi, y_mask, (1 << m.graph.n) - 1), (
        "intervention set failed post-hoc verification"
    )
    return chosen, sol.cost


def mcip_solve_heuristic(
    m: McipInstance, algorithm: str = "heid1"
) -> tuple[frozenset[int], float]:
    """Heuristic intervention set via a cut heuristic on the reduction."""
    inst, marker = mcip_to_edge_id(m)
    if algorithm == "heid1":
        sol: HeuristicSolution = heid1(inst)
    elif algorithm == "heid2":
        sol = heid2(inst)
    else:
        raise ValueError(f"unknown heuristic {algorithm!r}")
    chosen = frozenset(v for v, mk in marker.items() if mk in sol.removed)
    return chosen, sol.cost


def add_negative_correlation_gadget(
    m: McipInstance, x_set: Sequence[int]
) -> McipInstance:
    """Force any finite-cost solution to intervene on one of x_set.

    Grafts a private directed chain c1..ck feeding one extra target
    vertex.  Every member feeds the chain head, the extra target's only
    incoming edge leaves the chain tail, and each chain vertex is tied
    to exactly one member by its only bidirected edge.  Any hedge for
    the new target must therefore walk the whole chain and so contains
    every member of x_set: intervening on any single member dissolves
    them all, while leaving x_set alone keeps one hedge alive whose
    only finite-cost vertices are the members.  Link vertices d_i make
    the members one district without joining any pre-existing pair of
    vertices, so the hedges of the original targets are untouched.  All
    new vertices cost infinity.
    """
    order = list(dict.fromkeys(x_set))
    if not order:
        raise EmptySet("gadget needs a non-empty vertex list")
    g = m.graph
    for v in order:
        if v < 0 or v >= g.n:
            raise UnknownVertex(f"vertex {v} out of range")
    tag = g.n
    labels = list(g.labels)
    taken = set(labels)
    cost = dict(m.cost)

    def fresh(label: str) -> int:
        while label in taken:
            label += "'"
        taken.add(label)
        idx = len(labels)
        labels.append(label)
        cost[idx] = INF
        return idx

    chain = [fresh(f"c{i + 1}~{tag}") for i in range(len(order))]
    link = [fresh(f"d{i + 1}~{tag}") for i in range(len(order) - 1)]
    hat = fresh(f"yhat~{tag}")

    directed = list(sorted(g.directed_edges))
    bidirected = list(sorted(g.bidirected_edges))
    # ancestry side: the chain tail is the sole parent of the new
    # target and the chain head is the sole entry point, so reaching
    # the new target pulls in the entire chain
    for v in order:
        directed.append(Edge.directed(v, chain[0]))
    for d in link:
        directed.append(Edge.directed(d, chain[0]))
    for a, b in zip(chain, chain[1:]):
        directed.append(Edge.directed(a, b))
    directed.append(Edge.directed(chain[-1], hat))
    # connectivity side: each c_i reaches the district only through its
    # own member, the new target only through the first member
    bidirected.append(Edge.bidirected(order[0], hat))
    for v, c in zip(order, chain):
        bidirected.append(Edge.bidirected(v, c))
    for i, d in enumerate(link):
        bidirected.append(Edge.bidirected(order[i], d))
        bidirected.append(Edge.bidirected(d, order[i + 1]))

    return McipInstance(
        Admg(labels, directed, bidirected),
        cost,
        m.target | {hat},
    )


def constrained_pipeline(
    inst: WeightedInstance, constraints: Sequence[ExclusionConstraint]
) -> Solution:
    """Constrained removal solved through the intervention reduction.

    Rewrites the instance to an intervention instance, grafts one
    gadget per constraint onto the constraint edges' representative
    vertices, solves, and maps the chosen representatives back to
    edges.
    """
    m, evmap = edge_id_to_mcip(inst)
    for c in constraints:
        reps = [evmap.forward[e] for e in sorted(c.must_intersect)]
        m = add_negative_correlation_gadget(m, reps)
    chosen, cost = mcip_solve(m)
    removed = frozenset(evmap.backward[v] for v in chosen)
    assert len(removed) == len(chosen), "intervened vertex without an edge"
    kept = inst.graph.remove_edges(removed)
    pa, bi = _adjacency(inst.graph.n, kept.directed_edges | kept.bidirected_edges)
    y_mask = 0
    for v in inst.target:
        y_mask |= 1 << v
    assert _identifiable_m(pa, bi, y_mask, (1 << inst.graph.n) - 1)
    assert all(c.must_intersect & removed for c in constraints)
    return Solution(removed, cost, True, kept)
