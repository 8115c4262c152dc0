"""Randomized benchmark harness.

Samples probabilistic ADMGs under a sparsity target, runs the exact
solver and the cut heuristics side by side under a wall-clock budget,
and persists one record per (graph, algorithm) trial.  Records go to a
CSV with a fixed column set so downstream plotting never has to guess.

Generation protocol: a random topological order is drawn, every ordered
vertex pair receives a directed edge independently with the sparsity
probability and every unordered pair a bidirected edge likewise; edge
probabilities are uniform on [prob_low, prob_high]; the target is the
last vertex of the order.  Infeasible draws (identifiability not
reachable even by removing every finite-weight edge) are rejected and
resampled.
"""

from __future__ import annotations

import csv
import math
import random
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .admg import Admg, Edge, is_identifiable
from .errors import GenerationExhausted, Infeasible
from .exact import Solution, edge_id_exact, is_feasible
from .heuristics import best_heuristic, heid1, heid2
from .mcip import edge_id_to_mcip, mcip_solve_heuristic, mcip_to_edge_id
from .probmodel import (
    Objective,
    ProbabilisticAdmg,
    score_solution,
    to_edge_id_weights,
)

INF = math.inf

MAX_REJECTIONS = 10_000

ALGORITHMS = (
    "heid1",
    "heid2",
    "edgeid_exact",
    "mcip_via_t2_exact",
    "mcip_via_t2_heid1",
    "mcip_via_t2_heid2",
)

CSV_COLUMNS = (
    "algorithm",
    "graph_id",
    "n",
    "ed",
    "eb",
    "runtime_s",
    "cost",
    "score",
    "timed_out",
    "found",
)


@dataclass(frozen=True)
class GenConfig:
    """Knobs for random instance generation."""

    n_vertices: int
    edge_sparsity: float | None = None
    prob_low: float = 0.51
    prob_high: float = 1.0
    seed: int = 0
    require_feasible: bool = True

    def __post_init__(self):
        if self.n_vertices < 2:
            raise ValueError("need at least two vertices")
        if not 0.0 < self.sparsity <= 1.0:
            raise ValueError(f"sparsity out of range: {self.sparsity}")
        if not 0.0 < self.prob_low <= self.prob_high <= 1.0:
            raise ValueError(
                f"need 0 < prob_low <= prob_high <= 1, "
                f"got {self.prob_low}, {self.prob_high}"
            )

    @property
    def sparsity(self) -> float:
        if self.edge_sparsity is not None:
            return self.edge_sparsity
        return math.log(self.n_vertices) / self.n_vertices


@dataclass(frozen=True)
class Instance:
    """A generated problem: graph with probabilities plus target."""

    graph_id: str
    pg: ProbabilisticAdmg
    target: frozenset[int]


@dataclass(frozen=True)
class TrialRecord:
    """One algorithm run on one instance."""

    algorithm: str
    graph_id: str
    n: int
    ed: int
    eb: int
    runtime_s: float
    cost: float | None
    score: float | None
    timed_out: bool
    found: bool


def _draw(cfg: GenConfig, rng: random.Random) -> tuple[ProbabilisticAdmg, frozenset[int]]:
    n = cfg.n_vertices
    s = cfg.sparsity
    order = rng.sample(range(n), n)
    directed: list[Edge] = []
    bidirected: list[Edge] = []
    prob: dict[Edge, float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < s:
                e = Edge.directed(order[i], order[j])
                directed.append(e)
                prob[e] = rng.uniform(cfg.prob_low, cfg.prob_high)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < s:
                e = Edge.bidirected(u, v)
                bidirected.append(e)
                prob[e] = rng.uniform(cfg.prob_low, cfg.prob_high)
    g = Admg(tuple(f"v{i}" for i in range(n)), directed, bidirected)
    return ProbabilisticAdmg(g, prob), frozenset({order[-1]})


def _feasible(pg: ProbabilisticAdmg, target: frozenset[int]) -> bool:
    # Which edges are unremovable is the same under both objectives
    # (exactly the probability-one ones), so any weight map works here.
    return is_feasible(to_edge_id_weights(pg, Objective.MOST_PLAUSIBLE, target))


def generate_instance(cfg: GenConfig) -> tuple[ProbabilisticAdmg, frozenset[int]]:
    """One random instance, deterministic under cfg.seed."""
    rng = random.Random(cfg.seed)
    rejections = 0
    while True:
        pg, target = _draw(cfg, rng)
        if not cfg.require_feasible or _feasible(pg, target):
            return pg, target
        rejections += 1
        if rejections >= MAX_REJECTIONS:
            raise GenerationExhausted(
                f"no feasible draw in {MAX_REJECTIONS} attempts for {cfg}"
            )


def generate_batch(cfg: GenConfig, count: int) -> list[Instance]:
    """count distinct instances from one seeded stream.

    Draws whose edge sets duplicate an earlier member of the batch are
    rejected alongside infeasible ones, so a batch never evaluates the
    same structure twice.
    """
    rng = random.Random(cfg.seed)
    seen: set[frozenset[Edge]] = set()
    out: list[Instance] = []
    for k in range(count):
        rejections = 0
        while True:
            pg, target = _draw(cfg, rng)
            signature = pg.graph.directed_edges | pg.graph.bidirected_edges
            ok = signature not in seen and (
                not cfg.require_feasible or _feasible(pg, target)
            )
            if ok:
                seen.add(signature)
                out.append(
                    Instance(f"n{cfg.n_vertices}-s{cfg.seed}-g{k}", pg, target)
                )
                break
            rejections += 1
            if rejections >= MAX_REJECTIONS:
                raise GenerationExhausted(
                    f"no fresh feasible draw in {MAX_REJECTIONS} attempts "
                    f"for member {k} of {cfg}"
                )
    return out


def _heuristic_upper_bound(wi) -> float:
    try:
        return best_heuristic(wi).cost
    except Infeasible:
        return INF


def _run_trial(
    algorithm: str,
    inst: Instance,
    objective: Objective,
    timeout_secs: float,
) -> TrialRecord:
    pg, target = inst.pg, inst.target
    wi = to_edge_id_weights(pg, objective, target)
    removed: frozenset[Edge] | None = None
    cost: float | None = None
    timed_out = False

    if algorithm in ("heid1", "heid2"):
        fn = heid1 if algorithm == "heid1" else heid2
        t0 = time.perf_counter()
        try:
            sol = fn(wi)
            removed, cost = sol.removed, sol.cost
        except Infeasible:
            pass
        runtime = time.perf_counter() - t0
    elif algorithm == "edgeid_exact":
        # The warm-start bound comes from the separately benchmarked
        # heuristics, so its cost is not charged to the exact trial.
        ub = _heuristic_upper_bound(wi)
        deadline = time.monotonic() + timeout_secs
        t0 = time.perf_counter()
        sol = edge_id_exact(wi, upper_bound=ub, deadline=deadline)
        runtime = time.perf_counter() - t0
        timed_out = sol.timed_out
        if sol.identifiable:
            removed, cost = sol.removed, sol.cost
    elif algorithm == "mcip_via_t2_exact":
        ub = _heuristic_upper_bound(wi)
        deadline = time.monotonic() + timeout_secs
        # Transform time is part of what this pipeline costs, so the
        # clock starts before the rewrite in both directions.
        t0 = time.perf_counter()
        m, emap = edge_id_to_mcip(wi)
        inner, marker = mcip_to_edge_id(m)
        sol = edge_id_exact(inner, upper_bound=ub, deadline=deadline)
        runtime = time.perf_counter() - t0
        timed_out = sol.timed_out
        if sol.identifiable:
            chosen = [v for v, mk in marker.items() if mk in sol.removed]
            removed = frozenset(emap.backward[v] for v in chosen)
            cost = sol.cost
    elif algorithm in ("mcip_via_t2_heid1", "mcip_via_t2_heid2"):
        t0 = time.perf_counter()
        m, emap = edge_id_to_mcip(wi)
        try:
            chosen, c = mcip_solve_heuristic(m, algorithm.rsplit("_", 1)[1])
            removed = frozenset(emap.backward[v] for v in chosen)
            cost = c
        except Infeasible:
            pass
        runtime = time.perf_counter() - t0
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    score: float | None = None
    if removed is not None:
        kept = pg.graph.remove_edges(removed)
        if not is_identifiable(kept, target):
            raise AssertionError(
                f"{algorithm} returned a non-identifying removal on {inst.graph_id}"
            )
        score = score_solution(pg, removed, objective)
    return TrialRecord(
        algorithm=algorithm,
        graph_id=inst.graph_id,
        n=pg.graph.n,
        ed=len(pg.graph.directed_edges),
        eb=len(pg.graph.bidirected_edges),
        runtime_s=runtime,
        cost=cost,
        score=score,
        timed_out=timed_out,
        found=removed is not None,
    )


def run_comparison(
    instances: Iterable[Instance],
    algorithms: Sequence[str] = ALGORITHMS,
    timeout_secs: float = 180.0,
    objective: Objective = Objective.MOST_PROBABLE,
) -> list[TrialRecord]:
    """Every algorithm on every instance; failures recorded, not raised."""
    unknown = set(algorithms) - set(ALGORITHMS)
    if unknown:
        raise ValueError(f"unknown algorithms: {sorted(unknown)}")
    if objective is Objective.RAW_WEIGHTS:
        raise ValueError("comparison instances carry probabilities, not raw weights")
    records = []
    for inst in instances:
        for algorithm in algorithms:
            records.append(_run_trial(algorithm, inst, objective, timeout_secs))
    return records


def plausibility_ratio(pg: ProbabilisticAdmg, sol: Solution) -> float:
    """How much of the full graph's probability the kept graph retains.

    The product of (1-p)/p over the removed edges; 1.0 exactly when
    nothing was removed.
    """
    if not sol.identifiable:
        raise ValueError("ratio is only defined for identifying solutions")
    ratio = 1.0
    for e in sorted(sol.removed):
        p = pg.edge_probability(e)
        if p == 0.0:
            raise ValueError(f"removed edge {e} has probability zero")
        ratio *= (1.0 - p) / p
    return ratio


def ingest_real_graph(
    path,
    bidirected_sparsity: float | None = None,
    prob_low: float = 0.51,
    prob_high: float = 1.0,
    seed: int = 0,
    require_feasible: bool = True,
) -> tuple[ProbabilisticAdmg, frozenset[int]]:
    """Dress a directed skeleton file up as a random problem instance.

    Keeps the skeleton's directed edges, sprinkles bidirected edges at
    the sparsity rate (log(n)/n by default) and assigns every edge a
    probability uniform on [prob_low, prob_high].  The target is the
    last vertex of the deterministic topological order.
    """
    from .formats import load_graph

    doc = load_graph(path)
    skeleton = doc.graph()
    if skeleton.bidirected_edges:
        raise ValueError(f"{path}: skeleton already contains bidirected edges")
    n = skeleton.n
    s = bidirected_sparsity if bidirected_sparsity is not None else math.log(n) / n
    if not 0.0 < s <= 1.0:
        raise ValueError(f"sparsity out of range: {s}")
    if not 0.0 < prob_low <= prob_high <= 1.0:
        raise ValueError(f"need 0 < prob_low <= prob_high <= 1")

    directed = sorted(skeleton.directed_edges)
    rng = random.Random(seed)
    target = frozenset({skeleton.topological_order()[-1]})
    rejections = 0
    while True:
        prob: dict[Edge, float] = {}
        for e in directed:
            prob[e] = rng.uniform(prob_low, prob_high)
        bidirected: list[Edge] = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < s:
                    e = Edge.bidirected(u, v)
                    bidirected.append(e)
                    prob[e] = rng.uniform(prob_low, prob_high)
        pg = ProbabilisticAdmg(
            Admg(skeleton.labels, directed, bidirected), prob
        )
        if not require_feasible or _feasible(pg, target):
            return pg, target
        rejections += 1
        if rejections >= MAX_REJECTIONS:
            raise GenerationExhausted(
                f"no feasible augmentation of {path} in {MAX_REJECTIONS} attempts"
            )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if value == INF else repr(value)
    return str(value)


def write_records_csv(records: Iterable[TrialRecord], out) -> None:
    """Write the fixed-column CSV; out is a path or a text stream."""
    rows = sorted(records, key=lambda r: (r.n, r.graph_id, r.algorithm))
    own = isinstance(out, (str, bytes)) or hasattr(out, "__fspath__")
    fh = open(out, "w", encoding="utf-8", newline="") if own else out
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([_cell(getattr(r, col)) for col in CSV_COLUMNS])
    finally:
        if own:
            fh.close()


def _float_cell(text: str) -> float | None:
    return None if text == "" else float(text)


def read_records_csv(source) -> list[TrialRecord]:
    """Inverse of write_records_csv; source is a path or a text stream."""
    own = isinstance(source, (str, bytes)) or hasattr(source, "__fspath__")
    fh = open(source, encoding="utf-8", newline="") if own else source
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected header: {header}")
        out = []
        for row in reader:
            if len(row) != len(CSV_COLUMNS):
                raise ValueError(f"malformed row: {row}")
            alg, gid, n, ed, eb, rt, cost, score, to, found = row
            out.append(
                TrialRecord(
                    algorithm=alg,
                    graph_id=gid,
                    n=int(n),
                    ed=int(ed),
                    eb=int(eb),
                    runtime_s=float(rt),
                    cost=_float_cell(cost),
                    score=_float_cell(score),
                    timed_out=to == "true",
                    found=found == "true",
                )
            )
        return out
    finally:
        if own:
            fh.close()


def _spread(values: Sequence[float]) -> dict[str, float]:
    vs = sorted(values)
    if len(vs) == 1:
        return {"median": vs[0], "p5": vs[0], "p95": vs[0]}
    qs = statistics.quantiles(vs, n=20, method="inclusive")
    return {"median": statistics.median(vs), "p5": qs[0], "p95": qs[18]}


def aggregate_records(records: Iterable[TrialRecord]) -> dict:
    """Per-algorithm, per-size summaries for the three report panels.

    Runtime and cost get median plus 5th and 95th percentiles; costs
    include only finite found solutions.  The timeout panel is a plain
    fraction.
    """
    runtime: dict[str, dict[str, list[float]]] = {}
    cost: dict[str, dict[str, list[float]]] = {}
    timeouts: dict[str, dict[str, list[bool]]] = {}
    for r in records:
        key = str(r.n)
        runtime.setdefault(r.algorithm, {}).setdefault(key, []).append(r.runtime_s)
        timeouts.setdefault(r.algorithm, {}).setdefault(key, []).append(r.timed_out)
        if r.found and r.cost is not None and r.cost < INF:
            cost.setdefault(r.algorithm, {}).setdefault(key, []).append(r.cost)
    return {
        "runtime_s": {
            alg: {k: _spread(v) for k, v in by_n.items()}
            for alg, by_n in runtime.items()
        },
        "cost": {
            alg: {k: _spread(v) for k, v in by_n.items()}
            for alg, by_n in cost.items()
        },
        "timeout_fraction": {
            alg: {k: sum(v) / len(v) for k, v in by_n.items()}
            for alg, by_n in timeouts.items()
        },
    }
