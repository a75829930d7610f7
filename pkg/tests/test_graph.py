"""Tests for the directed narrative multigraph and its exports."""

from __future__ import annotations

import random
import xml.etree.ElementTree as ET
from collections import deque

import pytest

from narramine.graph import (
    Edge,
    NarrativeGraph,
    build_graph,
    centralities,
    centralities_to_tsv,
    edge_color,
    export_graph,
    from_json,
    prune,
    subgraph_around,
    to_dot,
    to_graphml,
    to_json,
)
from narramine.narratives import count_and_filter, NarrativeStatement
from narramine.stats.logodds import LogOddsResult


def statements(*triples, start_doc=0):
    out = []
    for i, (agent, verb, patient) in enumerate(triples):
        out.append(
            NarrativeStatement(
                agent=agent, verb=verb, patient=patient,
                doc_id=f"d{start_doc + i}", sent_id=0,
            )
        )
    return out


def chain_counts():
    return count_and_filter(
        statements(("taxes", "fund", "hospitals"), ("hospitals", "save", "lives"))
    )


def bfs_harmonic_closeness(vertices, simple_edges):
    """Oracle: BFS shortest paths over incoming edges, summed harmonically."""
    n = len(vertices)
    out = {}
    for v in vertices:
        dist = {v: 0}
        queue = deque([v])
        while queue:
            cur = queue.popleft()
            for (src, dst) in simple_edges:
                if dst == cur and src not in dist:
                    dist[src] = dist[cur] + 1
                    queue.append(src)
        harmonic = sum(1.0 / d for u, d in dist.items() if u != v)
        out[v] = harmonic / (n - 1) if n > 1 else 0.0
    return out


class TestBuild:
    def test_chain_fixture(self):
        graph = build_graph(chain_counts())
        assert graph.vertices == ["hospitals", "lives", "taxes"]
        assert graph.n_vertices() == 3
        assert graph.n_edges() == 2
        assert [(e.src, e.verb, e.dst) for e in graph.edges] == [
            ("hospitals", "save", "lives"),
            ("taxes", "fund", "hospitals"),
        ]

    def test_scores_attached(self):
        scores = {
            "taxes|fund|hospitals": LogOddsResult(
                key="taxes|fund|hospitals", delta=-1.5, variance=0.25, z=-3.0
            )
        }
        graph = build_graph(chain_counts(), scores)
        by_key = {e.key: e for e in graph.edges}
        assert by_key["taxes|fund|hospitals"].delta == -1.5
        assert by_key["taxes|fund|hospitals"].z == -3.0
        assert by_key["hospitals|save|lives"].delta is None

    def test_parallel_edges_kept(self):
        counts = count_and_filter(
            statements(("a", "praise", "b"), ("a", "thank", "b"), ("a", "praise", "b"))
        )
        graph = build_graph(counts)
        assert graph.n_edges() == 2
        assert graph.n_vertices() == 2
        freqs = {e.key: e.freq for e in graph.edges}
        assert freqs == {"a|praise|b": 2, "a|thank|b": 1}

    def test_self_loop_kept_as_edge(self):
        graph = build_graph(count_and_filter(statements(("x", "renew", "x"))))
        assert graph.vertices == ["x"]
        assert graph.n_edges() == 1


class TestEdgeColor:
    @pytest.mark.parametrize(
        "z, color",
        [
            (None, "gray"),
            (0.0, "gray"),
            (1.9599, "gray"),
            (1.96, "red"),
            (5.0, "red"),
            (-1.9599, "gray"),
            (-1.96, "blue"),
            (-4.2, "blue"),
        ],
    )
    def test_threshold(self, z, color):
        assert edge_color(z) == color


class TestCentralities:
    def test_chain_degrees_and_closeness(self):
        graph = build_graph(chain_counts())
        cents = centralities(graph)
        # taxes -> hospitals -> lives, n-1 = 2
        assert cents["taxes"].out_degree == 0.5
        assert cents["taxes"].in_degree == 0.0
        assert cents["hospitals"].in_degree == 0.5
        assert cents["hospitals"].out_degree == 0.5
        assert cents["lives"].in_degree == 0.5
        # incoming harmonic closeness: lives reached from hospitals (1) and taxes (2)
        assert cents["lives"].closeness == pytest.approx((1.0 + 0.5) / 2)
        assert cents["hospitals"].closeness == pytest.approx(1.0 / 2)
        assert cents["taxes"].closeness == 0.0

    def test_parallel_edges_count_in_degree_not_closeness(self):
        counts = count_and_filter(
            statements(("a", "x", "b"), ("a", "y", "b"), ("a", "z", "b"))
        )
        cents = centralities(build_graph(counts))
        assert cents["b"].in_degree == 3.0  # 3 parallel edges / (2-1)
        assert cents["b"].closeness == 1.0  # one neighbor at distance 1

    def test_self_loops_ignored_in_closeness(self):
        counts = count_and_filter(statements(("a", "loop", "a"), ("b", "hit", "a")))
        cents = centralities(build_graph(counts))
        assert cents["a"].closeness == 1.0
        assert cents["a"].in_degree == 2.0  # loop still counts as an in-edge

    def test_single_vertex_all_zero(self):
        graph = build_graph(count_and_filter(statements(("x", "renew", "x"))))
        cents = centralities(graph)
        assert cents["x"] .in_degree == 0.0
        assert cents["x"].closeness == 0.0

    def test_empty_graph(self):
        assert centralities(NarrativeGraph()) == {}

    def test_bfs_oracle_on_random_digraphs(self):
        rng = random.Random(1212)
        for _ in range(50):
            n = rng.randint(2, 8)
            vertices = [f"v{i}" for i in range(n)]
            simple = set()
            for _ in range(rng.randint(0, n * (n - 1))):
                src, dst = rng.sample(vertices, 2)
                simple.add((src, dst))
            edges = [Edge(src=s, dst=d, verb="e", freq=1) for s, d in simple]
            graph = NarrativeGraph(vertices=vertices, edges=edges)
            expected = bfs_harmonic_closeness(vertices, simple)
            got = centralities(graph)
            for v in vertices:
                assert got[v].closeness == pytest.approx(expected[v], abs=1e-12)

    def test_tsv_shape(self):
        text = centralities_to_tsv(centralities(build_graph(chain_counts())))
        lines = text.splitlines()
        assert lines[0] == "vertex\tin_degree\tout_degree\tcloseness"
        assert [l.split("\t")[0] for l in lines[1:]] == ["hospitals", "lives", "taxes"]


class TestPrune:
    def _graph(self):
        edges = [
            Edge(src="a", dst="b", verb="v1", freq=10),
            Edge(src="b", dst="c", verb="v2", freq=5),
            Edge(src="c", dst="a", verb="v3", freq=5),
            Edge(src="x", dst="y", verb="v4", freq=1),
        ]
        return NarrativeGraph(vertices=["a", "b", "c", "x", "y"], edges=edges)

    def test_top_k_by_frequency(self):
        pruned = prune(self._graph(), top_k=2)
        assert {e.key for e in pruned.edges} == {"a|v1|b", "b|v2|c"}
        assert pruned.vertices == ["a", "b", "c"]

    def test_tie_breaks_by_key_string(self):
        edges = [
            Edge(src="z", dst="w", verb="v", freq=5),
            Edge(src="a", dst="b", verb="v", freq=5),
        ]
        graph = NarrativeGraph(vertices=["a", "b", "w", "z"], edges=edges)
        pruned = prune(graph, top_k=1)
        assert pruned.edges[0].key == "a|v|b"

    def test_idempotent(self):
        for top_k in (None, 1, 2, 3, 99):
            once = prune(self._graph(), top_k=top_k)
            twice = prune(once, top_k=top_k)
            assert twice.vertices == once.vertices
            assert twice.edges == once.edges

    def test_isolated_vertices_dropped(self):
        pruned = prune(self._graph(), top_k=1)
        assert pruned.vertices == ["a", "b"]

    def test_largest_component(self):
        pruned = prune(self._graph(), largest_component=True)
        assert pruned.vertices == ["a", "b", "c"]
        assert all(e.src != "x" for e in pruned.edges)

    def test_component_tie_keeps_smallest_vertex(self):
        edges = [
            Edge(src="m", dst="n", verb="v", freq=1),
            Edge(src="a", dst="b", verb="v", freq=1),
        ]
        graph = NarrativeGraph(vertices=["a", "b", "m", "n"], edges=edges)
        pruned = prune(graph, largest_component=True)
        assert pruned.vertices == ["a", "b"]

    def test_top_k_zero_empties(self):
        pruned = prune(self._graph(), top_k=0)
        assert pruned.vertices == []
        assert pruned.edges == []

    def test_negative_top_k_rejected(self):
        with pytest.raises(ValueError, match="top_k"):
            prune(self._graph(), top_k=-1)


class TestExports:
    def _scored_graph(self):
        scores = {
            "taxes|fund|hospitals": LogOddsResult(
                key="taxes|fund|hospitals", delta=-1.5, variance=0.25, z=-3.0
            ),
            "hospitals|save|lives": LogOddsResult(
                key="hospitals|save|lives", delta=0.2, variance=1.0, z=0.2
            ),
        }
        return build_graph(chain_counts(), scores)

    def test_json_round_trip_identity(self):
        graph = self._scored_graph()
        restored = from_json(to_json(graph))
        assert restored.vertices == graph.vertices
        assert restored.edges == graph.edges
        assert to_json(restored) == to_json(graph)

    def test_json_carries_color(self):
        import json as jsonlib

        obj = jsonlib.loads(to_json(self._scored_graph()))
        colors = {e["src"]: e["color"] for e in obj["edges"]}
        assert colors["taxes"] == "blue"
        assert colors["hospitals"] == "gray"

    def test_from_json_requires_shape(self):
        with pytest.raises(ValueError, match="'nodes' and 'edges'"):
            from_json('{"vertices": []}')

    def test_dot_output(self):
        text = to_dot(self._scored_graph())
        assert text.startswith("digraph narratives {")
        assert '"taxes" -> "hospitals" [label="fund"' in text
        assert 'color="blue"' in text
        assert "delta=-1.5" in text
        assert text.rstrip().endswith("}")

    def test_dot_escapes_quotes(self):
        graph = NarrativeGraph(
            vertices=['say "x"', "b"],
            edges=[Edge(src='say "x"', dst="b", verb="v", freq=1)],
        )
        text = to_dot(graph)
        assert '"say \\"x\\""' in text

    def test_graphml_well_formed_and_typed(self):
        text = to_graphml(self._scored_graph())
        root = ET.fromstring(text)
        ns = "{http://graphml.graphdrawing.org/xmlns}"
        keys = {k.attrib["attr.name"]: k.attrib["attr.type"] for k in root.iter(f"{ns}key")}
        assert keys == {
            "verb": "string", "freq": "long", "delta": "double",
            "z": "double", "color": "string",
        }
        nodes = [n.attrib["id"] for n in root.iter(f"{ns}node")]
        assert nodes == ["hospitals", "lives", "taxes"]
        edges = list(root.iter(f"{ns}edge"))
        assert len(edges) == 2

    def test_graphml_escapes_xml(self):
        graph = NarrativeGraph(
            vertices=["a<b", "c&d"],
            edges=[Edge(src="a<b", dst="c&d", verb="<tag>", freq=1)],
        )
        root = ET.fromstring(to_graphml(graph))
        ns = "{http://graphml.graphdrawing.org/xmlns}"
        assert {n.attrib["id"] for n in root.iter(f"{ns}node")} == {"a<b", "c&d"}

    def test_export_graph_dispatch(self):
        graph = self._scored_graph()
        assert export_graph(graph, "dot") == to_dot(graph)
        assert export_graph(graph, "json") == to_json(graph)
        assert export_graph(graph, "graphml") == to_graphml(graph)
        with pytest.raises(ValueError, match="format"):
            export_graph(graph, "gexf")


class TestSubgraph:
    def test_one_hop(self):
        graph = build_graph(
            count_and_filter(
                statements(
                    ("a", "v", "b"), ("b", "v", "c"), ("c", "v", "d"), ("e", "v", "f")
                )
            )
        )
        sub = subgraph_around(graph, ["b"], hops=1)
        assert sub.vertices == ["a", "b", "c"]
        assert {e.key for e in sub.edges} == {"a|v|b", "b|v|c"}

    def test_zero_hops_induced(self):
        graph = build_graph(count_and_filter(statements(("a", "v", "b"), ("b", "v", "c"))))
        sub = subgraph_around(graph, ["a", "b"], hops=0)
        assert sub.vertices == ["a", "b"]
        assert [e.key for e in sub.edges] == ["a|v|b"]

    def test_unknown_vertex_ignored(self):
        graph = build_graph(count_and_filter(statements(("a", "v", "b"))))
        sub = subgraph_around(graph, ["zzz"], hops=2)
        assert sub.vertices == []
