"""Command line front end.

Subcommands: check (identifiability report), solve (minimum-cost edge
removal), rank (top-n removal sets), transform (edge instance to and
from intervention instance), bench (randomized comparison of the
solvers).  Graph files use the formats documented in formats.py.

Exit codes: 0 success, 2 bad input or flags, 3 query not identifiable
(check), 4 no solution exists, 5 time limit hit.  Data goes to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import json
import math
import sys
import time

import click

from . import __version__
from .admg import Admg, Edge, general_query_to_qy, is_identifiable, maximal_hedge
from .errors import (
    GenerationExhausted,
    HedgecutError,
    Infeasible,
    InvalidBounds,
    ParseError,
)
from .exact import Solution, edge_id_exact, is_feasible, rank_top_n
from .formats import GraphDoc, load_graph, serialize_graph
from .harness import (
    ALGORITHMS,
    GenConfig,
    aggregate_records,
    generate_batch,
    plausibility_ratio,
    run_comparison,
    write_records_csv,
)
from .heuristics import best_heuristic, heid1, heid2
from .mcip import edge_id_to_mcip, mcip_to_edge_id
from .probmodel import (
    Objective,
    ProbabilisticAdmg,
    WeightedInstance,
    free_drops,
    score_solution,
    to_edge_id_weights,
)

INF = math.inf

EXIT_BAD_INPUT = 2
EXIT_NOT_IDENTIFIABLE = 3
EXIT_INFEASIBLE = 4
EXIT_TIMEOUT = 5


def _fail(code: int, message) -> "NoReturn":  # noqa: F821
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _names(values: tuple[str, ...]) -> list[str]:
    out = [part for v in values for part in v.split(",") if part]
    if not out:
        _fail(EXIT_BAD_INPUT, "no vertex names given")
    return out


def _load(path: str) -> GraphDoc:
    try:
        return load_graph(path)
    except ParseError as err:
        _fail(EXIT_BAD_INPUT, err)


def _num(v: float) -> str:
    return "inf" if v == INF else f"{v:.12g}"


def _token(g: Admg, e: Edge) -> str:
    return f"{e.kind.value} {g.labels[e.u]} {g.labels[e.v]}"


def _vertex_set(g: Admg, vertices) -> str:
    return "{" + ", ".join(sorted(g.labels[v] for v in vertices)) + "}"


def _structural_graph(doc: GraphDoc) -> Admg:
    # Probability-zero edges are certainly absent, so identifiability
    # questions are asked without them.
    ix = {lbl: i for i, lbl in enumerate(doc.vertices)}
    return Admg(
        doc.vertices,
        [(ix[s], ix[d]) for s, d, p in doc.directed if p != 0.0],
        [(ix[u], ix[v]) for u, v, p in doc.bidirected if p != 0.0],
    )


@click.group()
@click.version_option(version=__version__, prog_name="hedgecut")
def main():
    """Minimum-cost edge removal for causal identifiability."""


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--y", "y_names", multiple=True, required=True,
              help="Target vertex names (repeat the flag or comma separate).")
@click.option("--x", "x_names", multiple=True,
              help="Intervention vertices; reduces do(x) on y to a plain target query.")
def check(graph_file, y_names, x_names):
    """Report whether the causal query on the target is identifiable."""
    doc = _load(graph_file)
    try:
        g = _structural_graph(doc)
        target = doc.target_indices(_names(y_names))
        derived = None
        if x_names:
            derived = general_query_to_qy(
                g, doc.target_indices(_names(x_names)), target
            )
            target = derived
        ident = is_identifiable(g, target)
        mh = maximal_hedge(g, target)
    except HedgecutError as err:
        _fail(EXIT_BAD_INPUT, err)
    click.echo(f"identifiable: {'true' if ident else 'false'}")
    click.echo(f"maximal hedge: {{{', '.join(sorted(mh.labels))}}}")
    if derived is not None:
        click.echo(f"derived target: {_vertex_set(g, derived)}")
    sys.exit(0 if ident else EXIT_NOT_IDENTIFIABLE)


def _heuristic_bound(wi: WeightedInstance) -> float:
    try:
        return best_heuristic(wi).cost
    except Infeasible:
        return INF


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--y", "y_names", multiple=True, required=True)
@click.option("--objective", "objective_name",
              type=click.Choice([o.value for o in Objective]),
              default=Objective.MOST_PROBABLE.value, show_default=True,
              help="How p fields are read: as probabilities under one of the "
                   "two objectives, or directly as removal weights.")
@click.option("--exact", "mode", flag_value="exact", default=True,
              help="Branch and bound search (default).")
@click.option("--heid1", "mode", flag_value="heid1",
              help="Directed-side cut heuristic.")
@click.option("--heid2", "mode", flag_value="heid2",
              help="Bidirected-side cut heuristic.")
@click.option("--best-heuristic", "mode", flag_value="best",
              help="Cheaper of the two heuristics.")
@click.option("--ub", type=float, default=None,
              help="Upper bound on solution cost; defaults to the best "
                   "heuristic cost in exact mode.")
@click.option("--th", type=float, default=0.0, show_default=True,
              help="Stop as soon as a solution at or below this cost is found.")
@click.option("--timeout", type=float, default=None,
              help="Seconds before the exact search returns its best so far.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the kept graph here.")
@click.option("--format", "fmt", type=click.Choice(["json", "lines"]),
              default="json", show_default=True)
def solve(graph_file, y_names, objective_name, mode, ub, th, timeout, out_path, fmt):
    """Find a minimum-cost edge set whose removal identifies the query."""
    doc = _load(graph_file)
    objective = Objective(objective_name)
    pg: ProbabilisticAdmg | None = None
    try:
        if objective is Objective.RAW_WEIGHTS:
            wi = doc.to_weighted(_names(y_names))
        else:
            pg = doc.to_probabilistic()
            target = frozenset(pg.graph.index(lbl) for lbl in _names(y_names))
            wi = to_edge_id_weights(pg, objective, target)
    except (HedgecutError, ValueError) as err:
        _fail(EXIT_BAD_INPUT, err)

    timed_out = False
    try:
        if mode == "exact":
            bound = _heuristic_bound(wi) if ub is None else ub
            deadline = time.monotonic() + timeout if timeout is not None else None
            sol = edge_id_exact(wi, upper_bound=bound, threshold=th, deadline=deadline)
            timed_out = sol.timed_out
        elif mode == "heid1":
            sol = heid1(wi)
        elif mode == "heid2":
            sol = heid2(wi)
        else:
            sol = best_heuristic(wi)
    except InvalidBounds as err:
        _fail(EXIT_BAD_INPUT, err)
    except Infeasible as err:
        _fail(EXIT_INFEASIBLE, err)

    if timed_out:
        click.echo("time limit reached; reporting the best solution so far", err=True)
    if not sol.identifiable:
        if timed_out:
            _fail(EXIT_TIMEOUT, "time limit reached before any solution was found")
        if is_feasible(wi):
            _fail(EXIT_INFEASIBLE, "no identifying removal within the given bounds")
        _fail(EXIT_INFEASIBLE,
              "no identifying removal exists: an unremovable edge set forms a hedge")

    if not sol.removed:
        click.echo("nothing to remove")
    else:
        click.echo("removed edges:")
        for e in sorted(sol.removed):
            click.echo(f"  {_token(wi.graph, e)}")
    click.echo(f"cost: {_num(sol.cost)}")

    dropped: frozenset[Edge] = frozenset()
    if pg is not None:
        click.echo(f"score: {_num(score_solution(pg, sol.removed, objective))}")
        click.echo(f"plausibility ratio: {_num(plausibility_ratio(pg, sol))}")
        if objective is Objective.MOST_PROBABLE:
            dropped = free_drops(pg, sol.removed)
            if dropped:
                click.echo("dropped free of charge (p < 0.5):")
                for e in sorted(dropped):
                    click.echo(f"  {_token(pg.graph, e)}")
    else:
        click.echo("score: n/a")
        click.echo("plausibility ratio: n/a")

    gone = sol.removed | dropped
    if pg is not None:
        kept_graph = pg.graph.remove_edges(gone)
        out_doc = GraphDoc.from_probabilistic(
            ProbabilisticAdmg(
                kept_graph, {e: p for e, p in pg.prob.items() if e not in gone}
            )
        )
    else:
        kept_graph = wi.graph.remove_edges(gone)
        out_doc = GraphDoc.from_weighted(
            WeightedInstance(
                kept_graph,
                {e: w for e, w in wi.weights.items() if e not in gone},
                wi.target,
            )
        )
    click.echo(
        f"kept graph: {kept_graph.n} vertices, "
        f"{len(kept_graph.directed_edges)} directed + "
        f"{len(kept_graph.bidirected_edges)} bidirected edges"
    )
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(serialize_graph(out_doc, fmt))
        click.echo(f"kept graph written to {out_path}", err=True)
    if timed_out:
        sys.exit(EXIT_TIMEOUT)


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--y", "y_names", multiple=True, required=True)
@click.option("--objective", "objective_name",
              type=click.Choice([Objective.MOST_PROBABLE.value,
                                 Objective.MOST_PLAUSIBLE.value]),
              default=Objective.MOST_PROBABLE.value, show_default=True)
@click.option("-n", "count", type=int, default=5, show_default=True,
              help="How many solutions to list.")
def rank(graph_file, y_names, objective_name, count):
    """List the best removal sets in decreasing score order."""
    doc = _load(graph_file)
    if count < 1:
        _fail(EXIT_BAD_INPUT, "-n must be at least 1")
    objective = Objective(objective_name)
    try:
        pg = doc.to_probabilistic()
        target = frozenset(pg.graph.index(lbl) for lbl in _names(y_names))
    except (HedgecutError, ValueError) as err:
        _fail(EXIT_BAD_INPUT, err)
    try:
        solutions = rank_top_n(pg, target, objective, count)
    except Infeasible as err:
        _fail(EXIT_INFEASIBLE, err)
    for i, sol in enumerate(solutions, start=1):
        edges = ", ".join(_token(pg.graph, e) for e in sorted(sol.removed))
        click.echo(f"{i}. score {_num(sol.score)}  removed: {edges or '(nothing)'}")


@main.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--y", "y_names", multiple=True, required=True)
@click.option("--direction", type=click.Choice(["to-mcip", "from-mcip"]),
              required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the transformed graph here instead of stdout.")
@click.option("--map-out", "map_path", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON correspondence map here; defaults to "
                   "OUT.map.json when --out is given.")
@click.option("--format", "fmt", type=click.Choice(["json", "lines"]),
              default="json", show_default=True)
def transform(graph_file, y_names, direction, out_path, map_path, fmt):
    """Rewrite between edge-removal and vertex-intervention instances.

    to-mcip reads the file's p fields as removal weights and emits an
    instance whose vertex costs mirror them; from-mcip reads vertex
    costs and emits an instance whose edge weights mirror those.
    """
    doc = _load(graph_file)
    ys = _names(y_names)
    try:
        if direction == "to-mcip":
            wi = doc.to_weighted(ys)
            m, emap = edge_id_to_mcip(wi)
            out_doc = GraphDoc.from_mcip(m)
            mapping = {
                "direction": "to-mcip",
                "target": sorted(m.graph.labels[v] for v in m.target),
                "edge_to_vertex": {
                    _token(wi.graph, e): m.graph.labels[v]
                    for e, v in emap.forward.items()
                },
                "vertex_to_edge": {
                    m.graph.labels[v]: _token(wi.graph, e)
                    for v, e in emap.backward.items()
                },
                "top": sorted(m.graph.labels[v] for v in emap.top),
                "bot": sorted(m.graph.labels[v] for v in emap.bot),
            }
        else:
            m = doc.to_mcip(ys)
            wi, marker = mcip_to_edge_id(m)
            out_doc = GraphDoc.from_weighted(wi)
            mapping = {
                "direction": "from-mcip",
                "target": sorted(wi.graph.labels[v] for v in wi.target),
                "vertex_to_marker_edge": {
                    m.graph.labels[v]: _token(wi.graph, e)
                    for v, e in marker.items()
                },
            }
    except (HedgecutError, ValueError) as err:
        _fail(EXIT_BAD_INPUT, err)

    text = serialize_graph(out_doc, fmt)
    if out_path is None:
        click.echo(text, nl=False)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"transformed graph written to {out_path}", err=True)
        if map_path is None:
            map_path = f"{out_path}.map.json"
    if map_path is not None:
        with open(map_path, "w", encoding="utf-8") as fh:
            json.dump(mapping, fh, indent=2, sort_keys=True)
            fh.write("\n")
        click.echo(f"correspondence map written to {map_path}", err=True)


@main.command()
@click.option("--n-list", default="5,10,20", show_default=True,
              help="Comma-separated graph sizes.")
@click.option("--batch", type=int, default=50, show_default=True,
              help="Distinct graphs per size.")
@click.option("--seed", type=int, default=0, envvar="HEDGECUT_SEED",
              show_default=True, help="Generator seed (HEDGECUT_SEED also works).")
@click.option("--timeout", type=float, default=180.0, show_default=True,
              help="Per-trial budget in seconds for the exact solvers.")
@click.option("--algos", default="heid1,heid2,edgeid_exact", show_default=True,
              help=f"Comma-separated subset of: {', '.join(ALGORITHMS)}.")
@click.option("--objective", "objective_name",
              type=click.Choice([Objective.MOST_PROBABLE.value,
                                 Objective.MOST_PLAUSIBLE.value]),
              default=Objective.MOST_PROBABLE.value, show_default=True)
@click.option("--sparsity", type=float, default=None,
              help="Edge probability; defaults to log(n)/n per size.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Results CSV path; stdout when omitted.")
@click.option("--aggregates", "agg_path", type=click.Path(dir_okay=False),
              default=None, help="Also write per-size summary JSON here.")
@click.option("--figures", "fig_dir", type=click.Path(file_okay=False),
              default=None, help="Directory for the three report panels; "
                                 "defaults to alongside --out.")
@click.option("--no-figures", is_flag=True, default=False,
              help="Skip figure rendering even when --out is given.")
def bench(n_list, batch, seed, timeout, algos, objective_name, sparsity,
          out_path, agg_path, fig_dir, no_figures):
    """Generate random instances and race the solvers on them."""
    try:
        sizes = [int(tok) for tok in n_list.split(",") if tok.strip()]
    except ValueError:
        _fail(EXIT_BAD_INPUT, f"bad --n-list: {n_list!r}")
    if not sizes:
        _fail(EXIT_BAD_INPUT, "empty --n-list")
    if batch < 1:
        _fail(EXIT_BAD_INPUT, "--batch must be at least 1")
    algorithms = [tok.strip() for tok in algos.split(",") if tok.strip()]
    objective = Objective(objective_name)

    instances = []
    try:
        for n in sizes:
            cfg = GenConfig(n_vertices=n, edge_sparsity=sparsity, seed=seed)
            instances.extend(generate_batch(cfg, batch))
    except (ValueError, GenerationExhausted) as err:
        _fail(EXIT_BAD_INPUT, err)
    try:
        records = run_comparison(
            instances, algorithms, timeout_secs=timeout, objective=objective
        )
    except ValueError as err:
        _fail(EXIT_BAD_INPUT, err)

    if out_path is None:
        write_records_csv(records, sys.stdout)
    else:
        write_records_csv(records, out_path)
        click.echo(f"{len(records)} records written to {out_path}", err=True)
    if agg_path is not None:
        with open(agg_path, "w", encoding="utf-8") as fh:
            json.dump(aggregate_records(records), fh, indent=2, sort_keys=True)
            fh.write("\n")
        click.echo(f"aggregates written to {agg_path}", err=True)

    prefix = ""
    if fig_dir is None and out_path is not None and not no_figures:
        import os

        fig_dir = os.path.dirname(out_path) or "."
        stem = os.path.splitext(os.path.basename(out_path))[0]
        prefix = f"{stem}."
    if fig_dir is not None and not no_figures:
        from .report import render_report

        for path in render_report(records, fig_dir, prefix):
            click.echo(f"figure written to {path}", err=True)


if __name__ == "__main__":
    main()
