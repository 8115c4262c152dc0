"""Independent reference implementations used to cross-check the library.

Everything here works from first principles on plain sets and lists:
identifiability is decided by exhaustively searching for a problematic
vertex superset rather than by the hull fixpoint the library uses, and
optimal removals are found by trying every subset of finite-weight
edges.  Slow on purpose; only run on small inputs.
"""

from __future__ import annotations

import math
from itertools import combinations

from hedgecut import Admg, Edge, WeightedInstance

INF = math.inf


def bi_components(n, bidirected, inside):
    """Connected components of the bidirected subgraph restricted to inside."""
    inside = set(inside)
    adj = {v: set() for v in inside}
    for e in bidirected:
        if e.u in inside and e.v in inside:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
    seen = set()
    parts = []
    for start in sorted(inside):
        if start in seen:
            continue
        comp = {start}
        queue = [start]
        while queue:
            v = queue.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        parts.append(frozenset(comp))
    return parts


def ancestors_within(directed, seeds, inside):
    """Reflexive ancestors of seeds using only edges inside the set."""
    inside = set(inside)
    out = set(seeds) & inside
    changed = True
    while changed:
        changed = False
        for e in directed:
            if e.u in inside and e.v in out and e.u not in out:
                out.add(e.u)
                changed = True
    return out


def ref_identifiable(g: Admg, target) -> bool:
    """Identifiability decided straight from the problematic-superset test.

    The query on the target fails to be identifiable exactly when some
    district of the target sits strictly inside a vertex set that is
    bidirected-connected as a whole and consists entirely of ancestors
    of that district within the induced subgraph.
    """
    target = set(target)
    rest = [v for v in range(g.n) if v not in target]
    for district in bi_components(g.n, g.bidirected_edges, target):
        extra = [v for v in range(g.n) if v not in district]
        for k in range(1, len(extra) + 1):
            for add in combinations(extra, k):
                x = district | set(add)
                if len(bi_components(g.n, g.bidirected_edges, x)) != 1:
                    continue
                if ancestors_within(g.directed_edges, district, x) == x:
                    return False
    return True


def ref_hedge_union(g: Admg, target) -> frozenset[int]:
    """Union of every problematic superset over the target's districts,
    plus the target itself."""
    target = set(target)
    out = set(target)
    for district in bi_components(g.n, g.bidirected_edges, target):
        extra = [v for v in range(g.n) if v not in district]
        for k in range(1, len(extra) + 1):
            for add in combinations(extra, k):
                x = district | set(add)
                if len(bi_components(g.n, g.bidirected_edges, x)) != 1:
                    continue
                if ancestors_within(g.directed_edges, district, x) == x:
                    out |= x
    return frozenset(out)


def ref_min_removal(inst: WeightedInstance):
    """Cheapest removal by exhaustive search over finite-weight edges.

    Returns (cost, removed frozenset) or (inf, None) when no subset
    works.  Ties break like the library's oracle: fewer edges first,
    then the lexicographically smallest edge tuple.
    """
    finite = sorted(e for e, w in inst.weights.items() if w < INF)
    best_key = None
    best = None
    for k in range(len(finite) + 1):
        for rm in combinations(finite, k):
            key = (sum(inst.weights[e] for e in rm), len(rm), rm)
            if best_key is not None and key >= best_key:
                continue
            kept = inst.graph.remove_edges(rm)
            if ref_identifiable(kept, inst.target):
                best_key = key
                best = frozenset(rm)
    if best is None:
        return INF, None
    return best_key[0], best


def ref_min_removal_constrained(inst: WeightedInstance, groups):
    """Like ref_min_removal but the removal must meet every edge group."""
    finite = sorted(e for e, w in inst.weights.items() if w < INF)
    groups = [frozenset(gr) for gr in groups]
    best_cost = INF
    for k in range(len(finite) + 1):
        for rm in combinations(finite, k):
            chosen = set(rm)
            if any(not (gr & chosen) for gr in groups):
                continue
            cost = sum(inst.weights[e] for e in rm)
            if cost >= best_cost:
                continue
            kept = inst.graph.remove_edges(rm)
            if ref_identifiable(kept, inst.target):
                best_cost = cost
    return best_cost


def random_admg(rng, n, p_dir=0.35, p_bi=0.35) -> Admg:
    """Random ADMG: a DAG over a shuffled order plus random bidirected edges."""
    order = list(range(n))
    rng.shuffle(order)
    directed = []
    bidirected = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p_dir:
                directed.append(Edge.directed(order[i], order[j]))
            if rng.random() < p_bi:
                bidirected.append(Edge.bidirected(order[i], order[j]))
    return Admg([f"v{i}" for i in range(n)], directed, bidirected)


def random_weighted(rng, n, p_dir=0.35, p_bi=0.35, p_inf=0.15) -> WeightedInstance:
    """Random weighted removal instance with a nonempty random target.

    A slice of the edges gets infinite weight; the rest draw uniform
    positive weights.  The instance is not guaranteed feasible.
    """
    g = random_admg(rng, n, p_dir, p_bi)
    weights = {}
    for e in sorted(g.directed_edges | g.bidirected_edges):
        weights[e] = INF if rng.random() < p_inf else rng.uniform(0.1, 3.0)
    size = 1 if n < 3 or rng.random() < 0.6 else 2
    target = frozenset(rng.sample(range(n), size))
    return WeightedInstance(g, weights, target)


def enumerate_admgs(n, max_edges=None):
    """Every ADMG over vertices 0..n-1 whose directed part follows the
    natural order, optionally capped at a total edge count.

    Up to relabelling this covers every DAG shape, since any DAG can be
    topologically sorted into the natural order.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = len(pairs)
    labels = [f"v{i}" for i in range(n)]
    for dbits in range(1 << m):
        d_count = dbits.bit_count()
        if max_edges is not None and d_count > max_edges:
            continue
        directed = [
            Edge.directed(*pairs[i]) for i in range(m) if dbits >> i & 1
        ]
        for bbits in range(1 << m):
            if max_edges is not None and d_count + bbits.bit_count() > max_edges:
                continue
            bidirected = [
                Edge.bidirected(*pairs[i]) for i in range(m) if bbits >> i & 1
            ]
            yield Admg(labels, directed, bidirected)
