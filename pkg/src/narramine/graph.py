"""The narrative graph: entities as vertices, narratives as directed edges.

Each surviving narrative key becomes one edge from its agent to its
patient, labeled with the verb and weighted by the narrative's total
count; parallel edges between the same pair of entities are kept.  Edges
can carry partisanship scores, which drive the export coloring (red
R-leaning, blue D-leaning, gray neutral at the 95% level).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional
from xml.sax.saxutils import escape, quoteattr

from .narratives import KEY_SEP, NarrativeCounts
from .stats.logodds import LogOddsResult

Z_SIGNIFICANT = 1.96

EXPORT_FORMATS = ("dot", "graphml", "json")


@dataclass(frozen=True)
class Edge:
    """One narrative as a directed edge (agent -> patient)."""

    src: str
    dst: str
    verb: str
    freq: int
    delta: Optional[float] = None
    z: Optional[float] = None

    @property
    def key(self) -> str:
        return KEY_SEP.join((self.src, self.verb, self.dst))


def edge_color(z: Optional[float]) -> str:
    """Red when significantly group-A-leaning (z >= 1.96), blue when
    significantly group-B-leaning (z <= -1.96), gray otherwise."""
    if z is not None:
        if z >= Z_SIGNIFICANT:
            return "red"
        if z <= -Z_SIGNIFICANT:
            return "blue"
    return "gray"


@dataclass
class NarrativeGraph:
    """A directed multigraph with sorted, deduplicated vertices."""

    vertices: list[str] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    def __post_init__(self):
        self.vertices = sorted(set(self.vertices))
        self.edges = sorted(self.edges, key=lambda e: (e.src, e.dst, e.verb))

    def n_vertices(self) -> int:
        return len(self.vertices)

    def n_edges(self) -> int:
        return len(self.edges)


def build_graph(
    counts: NarrativeCounts,
    scores: Optional[Mapping[str, LogOddsResult]] = None,
) -> NarrativeGraph:
    """One edge per narrative key; vertices are the labels that appear as
    agent or patient.  ``scores`` (keyed like narratives) attaches delta
    and z to matching edges."""
    edges = []
    vertices = set()
    for row in counts.rows.values():
        vertices.add(row.agent)
        vertices.add(row.patient)
        score = scores.get(row.key) if scores else None
        edges.append(
            Edge(
                src=row.agent,
                dst=row.patient,
                verb=row.verb,
                freq=row.total,
                delta=score.delta if score else None,
                z=score.z if score else None,
            )
        )
    return NarrativeGraph(vertices=sorted(vertices), edges=edges)


# ---------------------------------------------------------------------------
# centralities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Centrality:
    in_degree: float
    out_degree: float
    closeness: float


def _collapsed_adjacency(graph: NarrativeGraph) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in graph.vertices}
    for e in graph.edges:
        if e.src != e.dst:
            adj[e.src].add(e.dst)
    return adj


def centralities(graph: NarrativeGraph) -> dict[str, Centrality]:
    """Normalized degree and harmonic closeness per vertex.

    Degrees count parallel edges and divide by ``|V| - 1``.  Closeness is
    harmonic over incoming shortest paths on the collapsed simple digraph
    (self-loops ignored), also divided by ``|V| - 1``.  A single-vertex
    graph gets all zeros.
    """
    n = graph.n_vertices()
    if n == 0:
        return {}
    denom = float(n - 1)
    in_deg = {v: 0 for v in graph.vertices}
    out_deg = {v: 0 for v in graph.vertices}
    for e in graph.edges:
        out_deg[e.src] += 1
        in_deg[e.dst] += 1

    # reverse adjacency: BFS from v over reversed edges finds, for every u,
    # the length of the shortest directed path u -> v
    adj = _collapsed_adjacency(graph)
    radj: dict[str, set[str]] = {v: set() for v in graph.vertices}
    for src, dsts in adj.items():
        for dst in dsts:
            radj[dst].add(src)

    out: dict[str, Centrality] = {}
    for v in graph.vertices:
        harmonic = 0.0
        if denom > 0:
            dist = {v: 0}
            queue = deque([v])
            while queue:
                cur = queue.popleft()
                for nxt in radj[cur]:
                    if nxt not in dist:
                        dist[nxt] = dist[cur] + 1
                        queue.append(nxt)
            harmonic = sum(1.0 / d for u, d in dist.items() if u != v)
        out[v] = Centrality(
            in_degree=in_deg[v] / denom if denom > 0 else 0.0,
            out_degree=out_deg[v] / denom if denom > 0 else 0.0,
            closeness=harmonic / denom if denom > 0 else 0.0,
        )
    return out


CENTRALITY_TSV_HEADER = "vertex\tin_degree\tout_degree\tcloseness"


def centralities_to_tsv(cents: Mapping[str, Centrality]) -> str:
    lines = [CENTRALITY_TSV_HEADER]
    for v in sorted(cents):
        c = cents[v]
        lines.append(f"{v}\t{c.in_degree:.10g}\t{c.out_degree:.10g}\t{c.closeness:.10g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pruning
# ---------------------------------------------------------------------------


def prune(
    graph: NarrativeGraph,
    top_k: Optional[int] = None,
    largest_component: bool = False,
) -> NarrativeGraph:
    """Keep the ``top_k`` highest-frequency edges (ties broken by edge key),
    drop vertices left with no edges, and optionally keep only the largest
    weakly-connected component (ties: the component containing the
    lexicographically smallest vertex)."""
    edges = sorted(graph.edges, key=lambda e: (-e.freq, e.key))
    if top_k is not None:
        if top_k < 0:
            raise ValueError(f"top_k must be non-negative, got {top_k}")
        edges = edges[:top_k]
    vertices = sorted({e.src for e in edges} | {e.dst for e in edges})
    pruned = NarrativeGraph(vertices=vertices, edges=edges)

    if largest_component and pruned.vertices:
        undirected: dict[str, set[str]] = {v: set() for v in pruned.vertices}
        for e in pruned.edges:
            undirected[e.src].add(e.dst)
            undirected[e.dst].add(e.src)
        seen: set[str] = set()
        best: set[str] = set()
        for start in pruned.vertices:  # sorted, so ties keep the first seen
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                cur = queue.popleft()
                for nxt in undirected[cur]:
                    if nxt not in comp:
                        comp.add(nxt)
                        queue.append(nxt)
            seen |= comp
            if len(comp) > len(best):
                best = comp
        pruned = NarrativeGraph(
            vertices=sorted(best),
            edges=[e for e in pruned.edges if e.src in best and e.dst in best],
        )
    return pruned


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: NarrativeGraph) -> str:
    lines = ["digraph narratives {"]
    for v in graph.vertices:
        lines.append(f"  {_dot_quote(v)};")
    for e in graph.edges:
        attrs = [f"label={_dot_quote(e.verb)}", f"weight={e.freq}"]
        if e.delta is not None:
            attrs.append(f"delta={e.delta!r}")
        if e.z is not None:
            attrs.append(f"z={e.z!r}")
        attrs.append(f'color="{edge_color(e.z)}"')
        lines.append(f"  {_dot_quote(e.src)} -> {_dot_quote(e.dst)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


_GRAPHML_KEYS = [
    ("d_verb", "edge", "verb", "string"),
    ("d_freq", "edge", "freq", "long"),
    ("d_delta", "edge", "delta", "double"),
    ("d_z", "edge", "z", "double"),
    ("d_color", "edge", "color", "string"),
]


def to_graphml(graph: NarrativeGraph) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
    ]
    for key_id, domain, name, typ in _GRAPHML_KEYS:
        lines.append(
            f'  <key id="{key_id}" for="{domain}" attr.name="{name}" attr.type="{typ}"/>'
        )
    lines.append('  <graph edgedefault="directed">')
    for v in graph.vertices:
        lines.append(f"    <node id={quoteattr(v)}/>")
    for e in graph.edges:
        lines.append(f"    <edge source={quoteattr(e.src)} target={quoteattr(e.dst)}>")
        lines.append(f'      <data key="d_verb">{escape(e.verb)}</data>')
        lines.append(f'      <data key="d_freq">{e.freq}</data>')
        if e.delta is not None:
            lines.append(f'      <data key="d_delta">{e.delta!r}</data>')
        if e.z is not None:
            lines.append(f'      <data key="d_z">{e.z!r}</data>')
        lines.append(f'      <data key="d_color">{edge_color(e.z)}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def to_json(graph: NarrativeGraph) -> str:
    obj = {
        "nodes": [{"id": v} for v in graph.vertices],
        "edges": [
            {
                "src": e.src,
                "dst": e.dst,
                "verb": e.verb,
                "freq": e.freq,
                "delta": e.delta,
                "z": e.z,
                "color": edge_color(e.z),
            }
            for e in graph.edges
        ],
    }
    return json.dumps(obj, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


def from_json(text: str) -> NarrativeGraph:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "nodes" not in obj or "edges" not in obj:
        raise ValueError("graph JSON must be an object with 'nodes' and 'edges'")
    edges = [
        Edge(
            src=e["src"],
            dst=e["dst"],
            verb=e["verb"],
            freq=int(e["freq"]),
            delta=None if e.get("delta") is None else float(e["delta"]),
            z=None if e.get("z") is None else float(e["z"]),
        )
        for e in obj.get("edges", [])
    ]
    return NarrativeGraph(vertices=[n["id"] for n in obj["nodes"]], edges=edges)


def export_graph(graph: NarrativeGraph, fmt: str) -> str:
    """Render the graph as 'dot', 'graphml', or 'json' text."""
    if fmt == "dot":
        return to_dot(graph)
    if fmt == "graphml":
        return to_graphml(graph)
    if fmt == "json":
        return to_json(graph)
    raise ValueError(f"format must be one of {EXPORT_FORMATS}, got {fmt!r}")


def subgraph_around(
    graph: NarrativeGraph, vertices: Iterable[str], hops: int = 1
) -> NarrativeGraph:
    """The induced subgraph on the given vertices plus everything within
    ``hops`` undirected steps (a convenience for focused exports)."""
    selected = {v for v in vertices if v in set(graph.vertices)}
    undirected: dict[str, set[str]] = {v: set() for v in graph.vertices}
    for e in graph.edges:
        undirected[e.src].add(e.dst)
        undirected[e.dst].add(e.src)
    frontier = set(selected)
    for _ in range(max(0, hops)):
        nxt = set()
        for v in frontier:
            nxt |= undirected[v]
        frontier = nxt - selected
        selected |= nxt
    return NarrativeGraph(
        vertices=sorted(selected),
        edges=[e for e in graph.edges if e.src in selected and e.dst in selected],
    )
