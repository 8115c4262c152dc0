"""Acyclic directed mixed graphs and the structures behind causal identifiability.

An ADMG carries directed edges (cause to effect) and bidirected edges
(unobserved common causes).  Identifiability of the interventional
distribution over a target set reduces to a purely graphical condition:
no district of the target may sit inside a hedge.  This module supplies
the graph type plus the district / ancestor / hedge-hull operations that
the solvers build on.

Vertices are dense integers 0..n-1; each carries a display label.
Vertex sets are handled internally as integer bitmasks, which keeps the
repeated hull computations in the solvers cheap at any graph size.
"""

from __future__ import annotations

import heapq
from enum import Enum
from typing import Iterable, Iterator, NamedTuple

from .errors import (
    CycleDetected,
    EmptyTarget,
    NotADistrict,
    OverlappingSets,
    UnknownEdge,
    UnknownVertex,
)


class EdgeKind(str, Enum):
    BIDIRECTED = "b"
    DIRECTED = "d"


class Edge(NamedTuple):
    """One edge of a mixed graph.

    Bidirected endpoints are stored sorted, so the pair {u, v} always
    compares and hashes the same way regardless of construction order.
    For directed edges u is the source and v the destination.
    """

    kind: EdgeKind
    u: int
    v: int

    @classmethod
    def directed(cls, src: int, dst: int) -> "Edge":
        if src == dst:
            raise ValueError(f"self-loop on vertex {src}")
        return cls(EdgeKind.DIRECTED, src, dst)

    @classmethod
    def bidirected(cls, u: int, v: int) -> "Edge":
        if u == v:
            raise ValueError(f"self-loop on vertex {u}")
        if u > v:
            u, v = v, u
        return cls(EdgeKind.BIDIRECTED, u, v)

    @property
    def is_directed(self) -> bool:
        return self.kind is EdgeKind.DIRECTED

    def format(self, labels: tuple[str, ...]) -> str:
        if self.kind is EdgeKind.DIRECTED:
            return f"{labels[self.u]} -> {labels[self.v]}"
        return f"{labels[self.u]} <-> {labels[self.v]}"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _component(adj: list[int], seed: int, within: int) -> int:
    """Vertices reachable from seed through adj, staying inside within."""
    comp = seed & within
    frontier = comp
    while frontier:
        step = 0
        for v in _bits(frontier):
            step |= adj[v]
        step &= within & ~comp
        comp |= step
        frontier = step
    return comp


def _districts_m(bi: list[int], within: int) -> list[int]:
    """Bidirected-connected components of the induced subgraph, as masks.

    Ordered by smallest member, which fixes iteration order everywhere.
    """
    parts = []
    left = within
    while left:
        comp = _component(bi, left & -left, within)
        parts.append(comp)
        left &= ~comp
    return parts


def _hull_m(pa: list[int], bi: list[int], y: int, within: int) -> int:
    """Hedge hull of a single target district, as a mask.

    Alternately restricts the candidate set to the bidirected component
    of y and to the ancestors of y inside that component, until both
    agree.  The result is the union of every hedge formed for y (plus y
    itself); it equals y exactly when no hedge exists.
    """
    h = within
    while True:
        comp = _component(bi, y, h)
        anc = _component(pa, y, comp)
        if anc == comp:
            return anc
        h = anc


def _mh_m(pa: list[int], bi: list[int], y: int, within: int) -> int:
    """Union of hedge hulls over the districts of the target set."""
    out = 0
    for part in _districts_m(bi, y & within):
        out |= _hull_m(pa, bi, part, within)
    return out


def _identifiable_m(pa: list[int], bi: list[int], y: int, within: int) -> bool:
    return all(
        _hull_m(pa, bi, part, within) == part
        for part in _districts_m(bi, y & within)
    )


def _adjacency(n: int, edges: Iterable[Edge]) -> tuple[list[int], list[int]]:
    """Parent and bidirected-neighbour masks for an arbitrary edge set."""
    pa = [0] * n
    bi = [0] * n
    for e in edges:
        if e.kind is EdgeKind.DIRECTED:
            pa[e.v] |= 1 << e.u
        else:
            bi[e.v] |= 1 << e.u
            bi[e.u] |= 1 << e.v
    return pa, bi


class Admg:
    """Immutable acyclic directed mixed graph.

    Construction validates everything up front: labels unique, endpoints
    in range, no self-loops, no duplicate edges, directed part acyclic.
    Edge arguments may be Edge values or plain (u, v) index pairs.
    """

    __slots__ = (
        "labels",
        "directed_edges",
        "bidirected_edges",
        "_index",
        "_pa",
        "_ch",
        "_bi",
        "_topo",
        "_full",
    )

    def __init__(
        self,
        labels: Iterable[str],
        directed: Iterable[Edge | tuple[int, int]] = (),
        bidirected: Iterable[Edge | tuple[int, int]] = (),
    ):
        self.labels: tuple[str, ...] = tuple(labels)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("duplicate vertex labels")
        self._index = {lbl: i for i, lbl in enumerate(self.labels)}
        self._full = (1 << n) - 1

        def norm(items, make) -> frozenset[Edge]:
            out = set()
            for item in items:
                e = item if isinstance(item, Edge) else make(*item)
                if e.u < 0 or e.u >= n or e.v < 0 or e.v >= n:
                    raise UnknownVertex(f"edge endpoint out of range: {e}")
                if e in out:
                    raise ValueError(f"duplicate edge: {e}")
                out.add(e)
            return frozenset(out)

        self.directed_edges = norm(directed, Edge.directed)
        self.bidirected_edges = norm(bidirected, Edge.bidirected)
        bad = {e for e in self.directed_edges if not e.is_directed}
        bad |= {e for e in self.bidirected_edges if e.is_directed}
        if bad:
            raise ValueError(f"edge kind does not match argument: {sorted(bad)}")

        self._pa, self._bi = _adjacency(n, self.directed_edges | self.bidirected_edges)
        self._ch = [0] * n
        for e in self.directed_edges:
            self._ch[e.u] |= 1 << e.v
        self._topo = self._toposort()

    @property
    def n(self) -> int:
        return len(self.labels)

    def _toposort(self) -> tuple[int, ...]:
        # Kahn with a heap so ties go to the smallest index.
        indeg = [bin(self._pa[v]).count("1") for v in range(self.n)]
        ready = [v for v in range(self.n) if indeg[v] == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for c in _bits(self._ch[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, c)
        if len(order) != self.n:
            stuck = [self.labels[v] for v in range(self.n) if indeg[v] > 0]
            raise CycleDetected(f"directed cycle through {stuck}")
        return tuple(order)

    def topological_order(self) -> tuple[int, ...]:
        """Vertices in a directed-edge-respecting order, ties by index."""
        return self._topo

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownVertex(f"no vertex labelled {label!r}") from None

    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.bidirected_edges | self.directed_edges))

    def _check_vertices(self, vs: Iterable[int]) -> int:
        mask = 0
        for v in vs:
            if v < 0 or v >= self.n:
                raise UnknownVertex(f"vertex {v} out of range")
            mask |= 1 << v
        return mask

    def induced(self, vertices: Iterable[int]) -> "Admg":
        """Vertex-induced subgraph; kept vertices are reindexed densely,
        in increasing original order, and keep their labels."""
        mask = self._check_vertices(vertices)
        keep = sorted(_bits(mask))
        remap = {old: new for new, old in enumerate(keep)}
        return Admg(
            (self.labels[v] for v in keep),
            (
                Edge.directed(remap[e.u], remap[e.v])
                for e in self.directed_edges
                if e.u in remap and e.v in remap
            ),
            (
                Edge.bidirected(remap[e.u], remap[e.v])
                for e in self.bidirected_edges
                if e.u in remap and e.v in remap
            ),
        )

    def remove_edges(self, edges: Iterable[Edge]) -> "Admg":
        """Edge-induced subgraph over the same vertex set."""
        drop = set(edges)
        foreign = drop - self.directed_edges - self.bidirected_edges
        if foreign:
            raise UnknownEdge(f"not edges of this graph: {sorted(foreign)}")
        return Admg(
            self.labels,
            self.directed_edges - drop,
            self.bidirected_edges - drop,
        )

    def label_set(self, vertices: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.labels[v] for v in sorted(set(vertices)))

    def signature(self) -> tuple:
        return (self.labels, tuple(sorted(self.directed_edges)), tuple(sorted(self.bidirected_edges)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Admg):
            return NotImplemented
        return self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    def __repr__(self) -> str:
        return (
            f"Admg(n={self.n}, directed={len(self.directed_edges)}, "
            f"bidirected={len(self.bidirected_edges)})"
        )


def districts(g: Admg, s: Iterable[int]) -> tuple[frozenset[int], ...]:
    """Partition of s into bidirected-connected blocks of g restricted to s."""
    mask = g._check_vertices(s)
    return tuple(frozenset(_bits(m)) for m in _districts_m(g._bi, mask))


def ancestors(g: Admg, s: Iterable[int]) -> frozenset[int]:
    """Reflexive transitive closure of the parent relation over s."""
    mask = g._check_vertices(s)
    return frozenset(_bits(_component(g._pa, mask, g._full)))


def hedge_hull(g: Admg, y_district: Iterable[int]) -> frozenset[int]:
    """Union of all hedges formed for one district of the target.

    The argument must be a single district: bidirected-connected within
    itself.  Returns y_district itself exactly when no hedge exists.
    """
    mask = g._check_vertices(y_district)
    if mask == 0:
        raise EmptyTarget("district is empty")
    if len(_districts_m(g._bi, mask)) != 1:
        raise NotADistrict(
            f"{g.label_set(_bits(mask))} is not bidirected-connected within itself"
        )
    return frozenset(_bits(_hull_m(g._pa, g._bi, mask, g._full)))


def maximal_hedge(g: Admg, y: Iterable[int]) -> Admg:
    """Vertex-induced subgraph on the union of hedge hulls of y's districts.

    Every edge whose removal can matter for identifiability of the
    interventional query on y lives inside this subgraph; it collapses
    to g restricted to y exactly when the query is identifiable.
    """
    mask = g._check_vertices(y)
    if mask == 0:
        raise EmptyTarget("target is empty")
    return g.induced(_bits(_mh_m(g._pa, g._bi, mask, g._full)))


def is_identifiable(g: Admg, y: Iterable[int]) -> bool:
    """Whether the interventional distribution over y is identifiable."""
    mask = g._check_vertices(y)
    if mask == 0:
        raise EmptyTarget("target is empty")
    return _identifiable_m(g._pa, g._bi, mask, g._full)


def general_query_to_qy(g: Admg, x: Iterable[int], y: Iterable[int]) -> frozenset[int]:
    """Reduce an interventional query do(x) on outcome y to a target set.

    Deletes x and returns the ancestors of y in what remains; the
    original query is identifiable iff the query on the returned set is.
    """
    x_mask = g._check_vertices(x)
    y_mask = g._check_vertices(y)
    if y_mask == 0:
        raise EmptyTarget("outcome set is empty")
    if x_mask & y_mask:
        raise OverlappingSets(
            f"intervention and outcome overlap on {g.label_set(_bits(x_mask & y_mask))}"
        )
    return frozenset(_bits(_component(g._pa, y_mask, g._full & ~x_mask)))
