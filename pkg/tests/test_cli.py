import json
import math

import pytest
from click.testing import CliRunner

from hedgecut.cli import main
from hedgecut.formats import parse_graph
from hedgecut.harness import CSV_COLUMNS

CONFOUNDED4 = """\
v z
v t
v x
v y
d z x
d t x
d x y
b z x 0.7
b z y 0.9
b t x 0.7
b z t
"""

TWOTARGET_MCIP = """\
v x 1.0
v z 2.0
v y1
v y2
d z x
d x y1
b x z
b z y2
b y1 y2
"""

PAIRCHAIN_WEIGHTS = """\
v x1
v x2
v y1
v y2
d x2 x1 1.1
d x1 y1 1.3
b x1 x2 1.7
b x2 y2 1.9
b y1 y2 2.3
"""

CHAIN = "v a\nv b\nd a b\n"

UNREMOVABLE = "v a\nv b\nd a b\nb a b\n"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def fig_file(tmp_path):
    p = tmp_path / "confounded4.lines"
    p.write_text(CONFOUNDED4)
    return str(p)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestCheck:
    def test_identifiable_graph(self, runner, tmp_path):
        path = write(tmp_path, "chain.lines", CHAIN)
        r = runner.invoke(main, ["check", path, "--y", "b"])
        assert r.exit_code == 0
        assert "identifiable: true" in r.stdout
        assert "maximal hedge: {b}" in r.stdout

    def test_blocked_query_exits_three(self, runner, fig_file):
        r = runner.invoke(main, ["check", fig_file, "--y", "y"])
        assert r.exit_code == 3
        assert "identifiable: false" in r.stdout
        assert "maximal hedge: {t, x, y, z}" in r.stdout

    def test_hedge_for_intermediate_target(self, runner, fig_file):
        r = runner.invoke(main, ["check", fig_file, "--y", "x"])
        assert r.exit_code == 3
        assert "maximal hedge: {t, x, z}" in r.stdout

    def test_interventional_query_reduces_to_target(self, runner, fig_file):
        r = runner.invoke(main, ["check", fig_file, "--y", "y", "--x", "x"])
        assert r.exit_code == 3
        assert "derived target: {y}" in r.stdout

    def test_unknown_vertex_exits_two(self, runner, fig_file):
        r = runner.invoke(main, ["check", fig_file, "--y", "nope"])
        assert r.exit_code == 2
        assert "error:" in r.stderr

    def test_missing_file_exits_two(self, runner):
        r = runner.invoke(main, ["check", "/no/such/file", "--y", "y"])
        assert r.exit_code == 2


class TestSolve:
    def test_most_probable_optimum(self, runner, fig_file):
        r = runner.invoke(main, ["solve", fig_file, "--y", "y"])
        assert r.exit_code == 0
        lines = r.stdout.splitlines()
        assert lines[0] == "removed edges:"
        assert lines[1] == "  b z x"
        assert lines[2] == "  b t x"
        assert "cost: 1.69459572077" in lines
        assert "score: 0.081" in lines
        assert "plausibility ratio: 0.183673469388" in lines
        assert "kept graph: 4 vertices, 3 directed + 2 bidirected edges" in lines

    def test_most_plausible_optimum(self, runner, fig_file):
        r = runner.invoke(
            main, ["solve", fig_file, "--y", "y", "--objective", "most-plausible"]
        )
        assert r.exit_code == 0
        lines = r.stdout.splitlines()
        assert lines[1] == "  b z y"
        assert "cost: 2.30258509299" in lines
        assert "score: 0.1" in lines
        assert "plausibility ratio: 0.111111111111" in lines
        assert "kept graph: 4 vertices, 3 directed + 3 bidirected edges" in lines

    def test_heuristic_modes(self, runner, fig_file):
        r = runner.invoke(main, ["solve", fig_file, "--y", "y", "--heid2"])
        assert r.exit_code == 0 and "cost: 1.69459572077" in r.stdout
        r = runner.invoke(main, ["solve", fig_file, "--y", "y", "--heid1"])
        assert r.exit_code == 0 and "cost: 2.19722457734" in r.stdout
        r = runner.invoke(
            main,
            ["solve", fig_file, "--y", "y", "--heid1",
             "--objective", "most-plausible"],
        )
        assert r.exit_code == 0 and "cost: 2.30258509299" in r.stdout
        r = runner.invoke(main, ["solve", fig_file, "--y", "y", "--best-heuristic"])
        assert r.exit_code == 0 and "cost: 1.69459572077" in r.stdout

    def test_kept_graph_written_and_identified(self, runner, fig_file, tmp_path):
        out = str(tmp_path / "kept.json")
        r = runner.invoke(main, ["solve", fig_file, "--y", "y", "--out", out])
        assert r.exit_code == 0
        assert f"kept graph written to {out}" in r.stderr
        doc = parse_graph(open(out).read())
        assert len(doc.bidirected) == 2
        check = runner.invoke(main, ["check", out, "--y", "y"])
        assert check.exit_code == 0

    def test_nothing_to_remove(self, runner, tmp_path):
        path = write(tmp_path, "chain.lines", CHAIN)
        r = runner.invoke(main, ["solve", path, "--y", "b"])
        assert r.exit_code == 0
        assert "nothing to remove" in r.stdout
        assert "cost: 0" in r.stdout.splitlines()

    def test_cheap_edges_dropped_for_free(self, runner, tmp_path):
        path = write(
            tmp_path, "freedrop.lines",
            "v a\nv b\nv c\nv d\nd a b\nb a b 0.6\nb c d 0.3\n",
        )
        r = runner.invoke(main, ["solve", path, "--y", "b"])
        assert r.exit_code == 0
        lines = r.stdout.splitlines()
        assert "  b a b" in lines
        assert "cost: 0.405465108108" in lines
        assert "score: 0.28" in lines
        assert "dropped free of charge (p < 0.5):" in lines
        assert "  b c d" in lines
        assert "kept graph: 4 vertices, 1 directed + 0 bidirected edges" in lines

    def test_unremovable_hedge_exits_four(self, runner, tmp_path):
        path = write(tmp_path, "stuck.lines", UNREMOVABLE)
        r = runner.invoke(
            main, ["solve", path, "--y", "b", "--objective", "most-plausible"]
        )
        assert r.exit_code == 4
        assert "no identifying removal exists" in r.stderr
        r = runner.invoke(
            main,
            ["solve", path, "--y", "b", "--objective", "most-plausible", "--heid1"],
        )
        assert r.exit_code == 4

    def test_tight_bound_exits_four(self, runner, fig_file):
        r = runner.invoke(main, ["solve", fig_file, "--y", "y", "--ub", "1.0"])
        assert r.exit_code == 4
        assert "within the given bounds" in r.stderr

    def test_inverted_bounds_exit_two(self, runner, fig_file):
        r = runner.invoke(
            main, ["solve", fig_file, "--y", "y", "--ub", "1.0", "--th", "2.0"]
        )
        assert r.exit_code == 2

    def test_expired_timeout_exits_five(self, runner, fig_file):
        r = runner.invoke(main, ["solve", fig_file, "--y", "y", "--timeout", "0"])
        assert r.exit_code == 5
        assert "time limit" in r.stderr

    def test_weights_objective_reads_p_as_cost(self, runner, tmp_path):
        path = write(tmp_path, "pairchain.lines", PAIRCHAIN_WEIGHTS)
        r = runner.invoke(
            main,
            ["solve", path, "--y", "y1,y2", "--objective", "weights"],
        )
        assert r.exit_code == 0
        assert "score: n/a" in r.stdout
        assert "plausibility ratio: n/a" in r.stdout


class TestRank:
    def test_top_four_scores(self, runner, fig_file):
        r = runner.invoke(main, ["rank", fig_file, "--y", "y", "-n", "4"])
        assert r.exit_code == 0
        lines = r.stdout.splitlines()
        assert lines[0] == "1. score 0.081  removed: b z x, b t x"
        assert lines[1] == "2. score 0.049  removed: b z y"
        assert lines[2].startswith("3. score 0.021")
        assert lines[3].startswith("4. score 0.021")

    def test_count_is_respected(self, runner, fig_file):
        r = runner.invoke(main, ["rank", fig_file, "--y", "y", "-n", "2"])
        assert len(r.stdout.splitlines()) == 2

    def test_zero_count_exits_two(self, runner, fig_file):
        r = runner.invoke(main, ["rank", fig_file, "--y", "y", "-n", "0"])
        assert r.exit_code == 2


class TestTransform:
    def test_intervention_instance_to_edges_and_solve(self, runner, tmp_path):
        src = write(tmp_path, "twotarget.lines", TWOTARGET_MCIP)
        out = str(tmp_path / "edges.json")
        r = runner.invoke(
            main,
            ["transform", src, "--y", "y1,y2", "--direction", "from-mcip",
             "--out", out],
        )
        assert r.exit_code == 0
        assert f"transformed graph written to {out}" in r.stderr
        mapping = json.load(open(out + ".map.json"))
        assert mapping["direction"] == "from-mcip"
        assert mapping["vertex_to_marker_edge"]["x"] == "b x^1 x^2"
        assert mapping["vertex_to_marker_edge"]["z"] == "b z^1 z^2"

        solved = runner.invoke(
            main,
            ["solve", out, "--y", "y1,y2", "--objective", "weights", "--exact"],
        )
        assert solved.exit_code == 0
        assert "  b x^1 x^2" in solved.stdout.splitlines()
        assert "cost: 1" in solved.stdout.splitlines()

    def test_swapped_costs_flip_the_marker(self, runner, tmp_path):
        src = write(
            tmp_path, "flipped.lines",
            TWOTARGET_MCIP.replace("v x 1.0", "v x 5.0"),
        )
        out = str(tmp_path / "edges.json")
        r = runner.invoke(
            main,
            ["transform", src, "--y", "y1,y2", "--direction", "from-mcip",
             "--out", out],
        )
        assert r.exit_code == 0
        solved = runner.invoke(
            main, ["solve", out, "--y", "y1,y2", "--objective", "weights"]
        )
        assert "  b z^1 z^2" in solved.stdout.splitlines()
        assert "cost: 2" in solved.stdout.splitlines()

    def test_stdout_emission_parses(self, runner, tmp_path):
        src = write(tmp_path, "pairchain.lines", PAIRCHAIN_WEIGHTS)
        r = runner.invoke(
            main, ["transform", src, "--y", "y1,y2", "--direction", "to-mcip"]
        )
        assert r.exit_code == 0
        doc = parse_graph(r.stdout)
        assert doc.costs

    def test_map_sidecar_and_explicit_path(self, runner, tmp_path):
        src = write(tmp_path, "pairchain.lines", PAIRCHAIN_WEIGHTS)
        out = str(tmp_path / "m.json")
        mp = str(tmp_path / "corr.json")
        r = runner.invoke(
            main,
            ["transform", src, "--y", "y1,y2", "--direction", "to-mcip",
             "--out", out, "--map-out", mp],
        )
        assert r.exit_code == 0
        assert f"correspondence map written to {mp}" in r.stderr
        mapping = json.load(open(mp))
        assert mapping["direction"] == "to-mcip"
        assert set(mapping) == {
            "direction", "target", "edge_to_vertex", "vertex_to_edge", "top", "bot",
        }
        assert len(mapping["edge_to_vertex"]) == 5

    def test_double_transform_preserves_optimum(self, runner, tmp_path):
        def cost_of(result):
            for line in result.stdout.splitlines():
                if line.startswith("cost: "):
                    return float(line.split(": ")[1])
            raise AssertionError(result.stdout)

        src = write(tmp_path, "pairchain.lines", PAIRCHAIN_WEIGHTS)
        direct = runner.invoke(
            main, ["solve", src, "--y", "y1,y2", "--objective", "weights"]
        )
        assert direct.exit_code == 0

        mid = str(tmp_path / "m.json")
        r = runner.invoke(
            main,
            ["transform", src, "--y", "y1,y2", "--direction", "to-mcip",
             "--out", mid],
        )
        assert r.exit_code == 0
        mid_target = json.load(open(mid + ".map.json"))["target"]

        back = str(tmp_path / "back.json")
        r = runner.invoke(
            main,
            ["transform", mid, "--y", ",".join(mid_target),
             "--direction", "from-mcip", "--out", back],
        )
        assert r.exit_code == 0
        back_target = json.load(open(back + ".map.json"))["target"]

        roundabout = runner.invoke(
            main,
            ["solve", back, "--y", ",".join(back_target), "--objective", "weights"],
        )
        assert roundabout.exit_code == 0
        assert cost_of(roundabout) == pytest.approx(cost_of(direct), abs=1e-9)


def strip_runtimes(csv_text):
    out = []
    for line in csv_text.splitlines():
        cells = line.split(",")
        del cells[5]
        out.append(",".join(cells))
    return out


class TestBench:
    ARGS = ["bench", "--n-list", "5", "--batch", "3", "--seed", "7",
            "--timeout", "30"]

    def test_stdout_csv_shape(self, runner):
        r = runner.invoke(main, self.ARGS)
        assert r.exit_code == 0
        lines = r.stdout.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + 3 * 3

    def test_seeded_runs_agree_outside_runtimes(self, runner):
        a = runner.invoke(main, self.ARGS)
        b = runner.invoke(main, self.ARGS)
        assert strip_runtimes(a.stdout) == strip_runtimes(b.stdout)

    def test_seed_env_var_fallback(self, runner):
        flagged = runner.invoke(main, self.ARGS)
        env = runner.invoke(
            main,
            [a for a in self.ARGS if a not in ("--seed", "7")],
            env={"HEDGECUT_SEED": "7"},
        )
        assert strip_runtimes(env.stdout) == strip_runtimes(flagged.stdout)

    def test_output_files_and_figures(self, runner, tmp_path):
        out = str(tmp_path / "results.csv")
        aggs = str(tmp_path / "aggs.json")
        r = runner.invoke(
            main, self.ARGS + ["--out", out, "--aggregates", aggs]
        )
        assert r.exit_code == 0
        assert r.stdout == ""
        assert "records written to" in r.stderr
        assert r.stderr.count("figure written to") == 3
        assert (tmp_path / "results.runtimes.png").exists()
        assert (tmp_path / "results.costs.png").exists()
        assert (tmp_path / "results.timeout_fraction.png").exists()
        agg = json.load(open(aggs))
        assert set(agg) == {"runtime_s", "cost", "timeout_fraction"}
        header = open(out).readline().rstrip("\n")
        assert header == ",".join(CSV_COLUMNS)

    def test_figures_suppressed(self, runner, tmp_path):
        out = str(tmp_path / "results.csv")
        r = runner.invoke(main, self.ARGS + ["--out", out, "--no-figures"])
        assert r.exit_code == 0
        assert not list(tmp_path.glob("*.png"))

    def test_bad_algorithm_token(self, runner):
        r = runner.invoke(main, self.ARGS + ["--algos", "simplex"])
        assert r.exit_code == 2

    def test_bad_size_list(self, runner):
        r = runner.invoke(main, ["bench", "--n-list", "5,x"])
        assert r.exit_code == 2
        assert "bad --n-list" in r.stderr


def test_version_flag(runner):
    r = runner.invoke(main, ["--version"])
    assert r.exit_code == 0
    assert "hedgecut, version" in r.stdout
