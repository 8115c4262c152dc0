"""Graph file reading and writing.

Two interchangeable encodings of the same document.  JSON::

    {
      "vertices": ["z", {"name": "x", "cost": 2.5}],
      "directed": [{"src": "z", "dst": "x", "p": 0.7}],
      "bidirected": [{"u": "z", "v": "x", "p": 0.7}]
    }

and a terser line format meant for hand-authored fixtures::

    # comment
    v z
    v x 2.5
    d z x 0.7
    b z x 0.7

``p`` defaults to 1.0 and may be ``"inf"`` (the bare token ``inf`` in the
line format).  Vertex entries may carry an optional intervention cost;
plain entries carry none, which conversion to an intervention instance
reads as infinite.  Whether ``p`` means an existence probability or a
raw removal weight is decided by the conversion helpers, so one file
format serves every command.

Canonical form: vertices in first-appearance order, edges sorted by
label, probability fields omitted when 1.0.  Parsing a serialized
document yields an equal document.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

from .admg import Admg, Edge
from .errors import ParseError, UnknownVertex
from .mcip import McipInstance
from .probmodel import ProbabilisticAdmg, WeightedInstance

INF = math.inf

_JSON_ROOT_KEYS = {"vertices", "directed", "bidirected"}


def _check_name(name) -> str:
    if not isinstance(name, str) or not name:
        raise ValueError(f"vertex name must be a non-empty string, got {name!r}")
    if "#" in name or any(c.isspace() for c in name):
        raise ValueError(f"vertex name {name!r} may not contain '#' or whitespace")
    return name


def _check_value(value: float, what: str) -> float:
    value = float(value)
    if math.isnan(value) or value < 0.0:
        raise ValueError(f"{what} must be a non-negative number, got {value}")
    return value


@dataclass(frozen=True)
class GraphDoc:
    """Parsed graph file: labels, optional vertex costs, labelled edges.

    Edges are (src, dst, p) respectively (u, v, p) label triples.
    Construction normalizes to canonical form; endpoints must appear in
    ``vertices``.
    """

    vertices: tuple[str, ...]
    directed: tuple[tuple[str, str, float], ...] = ()
    bidirected: tuple[tuple[str, str, float], ...] = ()
    costs: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(_check_name(v) for v in self.vertices)
        if len(set(names)) != len(names):
            raise ValueError("duplicate vertex declaration")
        known = set(names)
        for lbl, c in self.costs.items():
            if lbl not in known:
                raise ValueError(f"cost for undeclared vertex {lbl!r}")
            _check_value(c, f"cost of {lbl!r}")

        def norm(triples, bidirected: bool):
            out = []
            for a, b, p in triples:
                if a not in known or b not in known:
                    raise ValueError(f"edge endpoint not declared: {(a, b)}")
                if a == b:
                    raise ValueError(f"self loop on {a!r}")
                if bidirected and b < a:
                    a, b = b, a
                out.append((a, b, _check_value(p, f"p of edge {(a, b)}")))
            out.sort()
            for prev, cur in zip(out, out[1:]):
                if prev[:2] == cur[:2]:
                    raise ValueError(f"duplicate edge {cur[:2]}")
            return tuple(out)

        object.__setattr__(self, "vertices", names)
        object.__setattr__(self, "directed", norm(self.directed, False))
        object.__setattr__(self, "bidirected", norm(self.bidirected, True))
        object.__setattr__(self, "costs", dict(self.costs))

    def graph(self) -> Admg:
        ix = {lbl: i for i, lbl in enumerate(self.vertices)}
        return Admg(
            self.vertices,
            [(ix[s], ix[d]) for s, d, _ in self.directed],
            [(ix[u], ix[v]) for u, v, _ in self.bidirected],
        )

    def target_indices(self, labels) -> frozenset[int]:
        ix = {lbl: i for i, lbl in enumerate(self.vertices)}
        missing = [lbl for lbl in labels if lbl not in ix]
        if missing:
            raise UnknownVertex(f"unknown vertex names: {missing}")
        return frozenset(ix[lbl] for lbl in labels)

    def to_probabilistic(self) -> ProbabilisticAdmg:
        """Interpret p fields as existence probabilities.

        Probability-zero edges are certainly absent and are dropped from
        the constructed graph rather than carried around.
        """
        for _, _, p in self.directed + self.bidirected:
            if p > 1.0:
                raise ValueError(f"probability out of range: {p}")
        ix = {lbl: i for i, lbl in enumerate(self.vertices)}
        prob: dict[Edge, float] = {}
        directed = []
        bidirected = []
        for s, d, p in self.directed:
            if p == 0.0:
                continue
            e = Edge.directed(ix[s], ix[d])
            directed.append(e)
            prob[e] = p
        for u, v, p in self.bidirected:
            if p == 0.0:
                continue
            e = Edge.bidirected(ix[u], ix[v])
            bidirected.append(e)
            prob[e] = p
        return ProbabilisticAdmg(Admg(self.vertices, directed, bidirected), prob)

    def to_weighted(self, target_labels) -> WeightedInstance:
        """Interpret p fields as raw removal weights."""
        g = self.graph()
        ix = {lbl: i for i, lbl in enumerate(self.vertices)}
        weights: dict[Edge, float] = {}
        for s, d, p in self.directed:
            weights[Edge.directed(ix[s], ix[d])] = p
        for u, v, p in self.bidirected:
            weights[Edge.bidirected(ix[u], ix[v])] = p
        return WeightedInstance(g, weights, self.target_indices(target_labels))

    def to_mcip(self, target_labels) -> McipInstance:
        """Interpret vertex costs as intervention costs (absent = infinite)."""
        g = self.graph()
        cost = {i: self.costs.get(lbl, INF) for i, lbl in enumerate(self.vertices)}
        return McipInstance(g, cost, self.target_indices(target_labels))

    @classmethod
    def from_probabilistic(cls, pg: ProbabilisticAdmg) -> "GraphDoc":
        return cls._from_graph(pg.graph, pg.prob, {})

    @classmethod
    def from_weighted(cls, inst: WeightedInstance) -> "GraphDoc":
        return cls._from_graph(inst.graph, inst.weights, {})

    @classmethod
    def from_mcip(cls, m: McipInstance) -> "GraphDoc":
        costs = {
            m.graph.labels[v]: c for v, c in m.cost.items() if c < INF
        }
        ones = {e: 1.0 for e in m.graph.directed_edges | m.graph.bidirected_edges}
        return cls._from_graph(m.graph, ones, costs)

    @classmethod
    def _from_graph(cls, g: Admg, values: Mapping[Edge, float], costs) -> "GraphDoc":
        lbl = g.labels
        directed = [
            (lbl[e.u], lbl[e.v], values[e]) for e in g.directed_edges
        ]
        bidirected = [
            (lbl[e.u], lbl[e.v], values[e]) for e in g.bidirected_edges
        ]
        return cls(lbl, directed, bidirected, costs)


def _number(raw, what: str) -> float:
    if raw == "inf":
        return INF
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValueError(f"{what} must be a number or \"inf\", got {raw!r}")
    return float(raw)


def _parse_json(text: str, source: str) -> GraphDoc:
    try:
        root = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{source}:{err.lineno}:{err.colno}: {err.msg}") from None

    def fail(msg: str):
        raise ValueError(msg)

    vertices: list[str] = []
    seen: set[str] = set()
    costs: dict[str, float] = {}

    def add_vertex(name: str):
        if name not in seen:
            seen.add(name)
            vertices.append(name)

    def edge_list(key: str, a_key: str, b_key: str):
        out = []
        for i, entry in enumerate(root.get(key, ())):
            if not isinstance(entry, dict):
                fail(f"{key} entry {i} must be an object")
            unknown = set(entry) - {a_key, b_key, "p"}
            if unknown:
                fail(f"{key} entry {i}: unknown keys {sorted(unknown)}")
            try:
                a, b = entry[a_key], entry[b_key]
            except KeyError as err:
                fail(f"{key} entry {i}: missing {err.args[0]!r}")
            for name in (a, b):
                _check_name(name)
                add_vertex(name)
            p = _number(entry.get("p", 1.0), f"{key} entry {i} p")
            out.append((a, b, p))
        return out

    try:
        if not isinstance(root, dict):
            fail("top level must be an object")
        unknown = set(root) - _JSON_ROOT_KEYS
        if unknown:
            fail(f"unknown top-level keys: {sorted(unknown)}")
        for i, entry in enumerate(root.get("vertices", ())):
            if isinstance(entry, str):
                add_vertex(entry)
            elif isinstance(entry, dict):
                unknown = set(entry) - {"name", "cost"}
                if unknown:
                    fail(f"vertex entry {i}: unknown keys {sorted(unknown)}")
                if "name" not in entry:
                    fail(f"vertex entry {i}: missing \"name\"")
                name = entry["name"]
                add_vertex(name)
                if "cost" in entry:
                    costs[name] = _number(entry["cost"], f"cost of {name!r}")
            else:
                fail(f"vertex entry {i} must be a string or an object")
        directed = edge_list("directed", "src", "dst")
        bidirected = edge_list("bidirected", "u", "v")
        return GraphDoc(tuple(vertices), directed, bidirected, costs)
    except ValueError as err:
        raise ParseError(f"{source}: {err}") from None


def _parse_lines(text: str, source: str) -> GraphDoc:
    vertices: list[str] = []
    seen: set[str] = set()
    costs: dict[str, float] = {}
    directed = []
    bidirected = []

    def add_vertex(name: str, lineno: int):
        try:
            _check_name(name)
        except ValueError as err:
            raise ParseError(f"{source}:{lineno}: {err}") from None
        if name not in seen:
            seen.add(name)
            vertices.append(name)

    def number(token: str, lineno: int) -> float:
        try:
            return float(token)
        except ValueError:
            raise ParseError(f"{source}:{lineno}: not a number: {token!r}") from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        tag, rest = tokens[0], tokens[1:]
        if tag == "v" and 1 <= len(rest) <= 2:
            if rest[0] in seen:
                raise ParseError(f"{source}:{lineno}: duplicate vertex {rest[0]!r}")
            add_vertex(rest[0], lineno)
            if len(rest) == 2:
                costs[rest[0]] = number(rest[1], lineno)
        elif tag in ("d", "b") and 2 <= len(rest) <= 3:
            a, b = rest[0], rest[1]
            add_vertex(a, lineno)
            add_vertex(b, lineno)
            p = number(rest[2], lineno) if len(rest) == 3 else 1.0
            (directed if tag == "d" else bidirected).append((a, b, p))
        else:
            raise ParseError(
                f"{source}:{lineno}: expected 'v name [cost]', "
                f"'d src dst [p]' or 'b u v [p]', got {line!r}"
            )

    try:
        return GraphDoc(tuple(vertices), directed, bidirected, costs)
    except ValueError as err:
        raise ParseError(f"{source}: {err}") from None


def parse_graph(text: str, source: str = "<graph>") -> GraphDoc:
    """Parse either format, telling them apart by the first character."""
    stripped = text.lstrip()
    if not stripped or all(
        line.lstrip().startswith("#") or not line.strip()
        for line in text.splitlines()
    ):
        raise ParseError(f"{source}: empty graph file")
    if stripped[0] == "{":
        return _parse_json(text, source)
    return _parse_lines(text, source)


def load_graph(path) -> GraphDoc:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ParseError(f"{path}: {err.strerror or err}") from None
    return parse_graph(text, source=str(path))


def _p_json(p: float):
    return "inf" if p == INF else p


def serialize_json(doc: GraphDoc) -> str:
    vertices = [
        {"name": v, "cost": _p_json(doc.costs[v])} if v in doc.costs else v
        for v in doc.vertices
    ]
    directed = []
    for s, d, p in doc.directed:
        entry: dict = {"src": s, "dst": d}
        if p != 1.0:
            entry["p"] = _p_json(p)
        directed.append(entry)
    bidirected = []
    for u, v, p in doc.bidirected:
        entry = {"u": u, "v": v}
        if p != 1.0:
            entry["p"] = _p_json(p)
        bidirected.append(entry)
    obj = {"vertices": vertices, "directed": directed, "bidirected": bidirected}
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def serialize_lines(doc: GraphDoc) -> str:
    # repr() floats survive the round trip exactly; float("inf") parses back.
    out = []
    for v in doc.vertices:
        out.append(f"v {v} {repr(doc.costs[v])}" if v in doc.costs else f"v {v}")
    for tag, triples in (("d", doc.directed), ("b", doc.bidirected)):
        for a, b, p in triples:
            out.append(f"{tag} {a} {b}" if p == 1.0 else f"{tag} {a} {b} {p!r}")
    return "\n".join(out) + "\n"


def serialize_graph(doc: GraphDoc, fmt: str = "json") -> str:
    if fmt == "json":
        return serialize_json(doc)
    if fmt == "lines":
        return serialize_lines(doc)
    raise ValueError(f"unknown format {fmt!r}")
