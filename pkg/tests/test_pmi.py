"""Tests for document-level narrative PMI."""

from __future__ import annotations

import itertools
import math
import random

import pytest

from narramine.stats.pmi import (
    CooccurrenceTable,
    build_cooccurrence,
    pmi_pairs,
    to_tsv,
)


def brute_force_pmi(doc_keys: dict) -> dict[tuple[str, str], float]:
    """PMI from first principles by scanning the documents per pair."""
    docs = list(doc_keys.values())
    n = len(docs)
    keys = sorted({k for ks in docs for k in ks})
    out = {}
    for ki, kj in itertools.combinations(keys, 2):
        joint = sum(1 for ks in docs if ki in ks and kj in ks)
        if joint == 0:
            continue
        p_i = sum(1 for ks in docs if ki in ks) / n
        p_j = sum(1 for ks in docs if kj in ks) / n
        out[(ki, kj)] = math.log((joint / n) / (p_i * p_j))
    return out


class TestCooccurrence:
    def test_counts(self):
        table = build_cooccurrence(
            {"d1": ["a", "b", "a"], "d2": ["b", "c"], "d3": ["a"]}
        )
        assert table.n_docs == 3
        assert table.doc_count == {"a": 2, "b": 2, "c": 1}
        # within-document duplicates collapse; pairs are unordered (sorted)
        assert table.joint_count == {("a", "b"): 1, ("b", "c"): 1}

    def test_pair_key_order_canonical(self):
        table = build_cooccurrence({"d1": ["z", "a"]})
        assert list(table.joint_count) == [("a", "z")]

    def test_empty(self):
        table = build_cooccurrence({})
        assert table.n_docs == 0
        assert pmi_pairs(table) == []


class TestPMI:
    def test_independence_is_zero(self):
        # a and b occur in half the docs each, overlapping in exactly n/4
        doc_keys = {
            "d1": ["a", "b"],
            "d2": ["a"],
            "d3": ["b"],
            "d4": [],
        }
        results = pmi_pairs(build_cooccurrence(doc_keys))
        assert len(results) == 1
        # P(a)=1/2, P(b)=1/2, P(ab)=1/4 -> pmi = ln(1) = 0
        assert abs(results[0].pmi) < 1e-12

    def test_always_cooccur_is_minus_log_p(self):
        # a and b always appear together in p = 2/8 of the docs
        doc_keys = {f"d{i}": (["a", "b"] if i < 2 else ["c"]) for i in range(8)}
        results = pmi_pairs(build_cooccurrence(doc_keys))
        pair = [r for r in results if (r.key_i, r.key_j) == ("a", "b")][0]
        assert pair.pmi == pytest.approx(-math.log(2 / 8), abs=1e-12)

    def test_six_doc_brute_force(self):
        doc_keys = {
            "d1": ["a", "b", "c"],
            "d2": ["a", "b"],
            "d3": ["b", "c", "d"],
            "d4": ["d"],
            "d5": ["a", "d"],
            "d6": ["b"],
        }
        expected = brute_force_pmi(doc_keys)
        results = pmi_pairs(build_cooccurrence(doc_keys))
        got = {(r.key_i, r.key_j): r.pmi for r in results}
        assert set(got) == set(expected)
        for pair in expected:
            assert got[pair] == pytest.approx(expected[pair], abs=1e-12)

    def test_random_brute_force(self):
        rng = random.Random(404)
        for _ in range(20):
            doc_keys = {
                f"d{i}": [rng.choice("abcdef") for _ in range(rng.randint(0, 5))]
                for i in range(rng.randint(2, 10))
            }
            expected = brute_force_pmi(doc_keys)
            got = {
                (r.key_i, r.key_j): r.pmi
                for r in pmi_pairs(build_cooccurrence(doc_keys))
            }
            assert set(got) == set(expected)
            for pair in expected:
                assert got[pair] == pytest.approx(expected[pair], abs=1e-12)

    def test_zero_joint_pairs_absent(self):
        results = pmi_pairs(build_cooccurrence({"d1": ["a"], "d2": ["b"]}))
        assert results == []

    def test_min_joint_filter(self):
        doc_keys = {
            "d1": ["a", "b"],
            "d2": ["a", "b"],
            "d3": ["a", "c"],
        }
        table = build_cooccurrence(doc_keys)
        assert len(pmi_pairs(table, min_joint=1)) == 2
        kept = pmi_pairs(table, min_joint=2)
        assert [(r.key_i, r.key_j) for r in kept] == [("a", "b")]
        assert kept[0].joint == 2

    def test_min_joint_validation(self):
        with pytest.raises(ValueError, match="min_joint"):
            pmi_pairs(CooccurrenceTable(n_docs=1), min_joint=0)

    def test_ordering_pmi_desc_then_pair(self):
        doc_keys = {
            "d1": ["a", "b"],
            "d2": ["a", "b"],
            "d3": ["c", "d"],
            "d4": ["a", "c"],
            "d5": ["b", "d"],
        }
        results = pmi_pairs(build_cooccurrence(doc_keys))
        values = [r.pmi for r in results]
        assert values == sorted(values, reverse=True)
        for prev, cur in zip(results, results[1:]):
            if prev.pmi == cur.pmi:
                assert (prev.key_i, prev.key_j) < (cur.key_i, cur.key_j)

    def test_counts_reported(self):
        results = pmi_pairs(build_cooccurrence({"d1": ["a", "b"], "d2": ["a"]}))
        r = results[0]
        assert (r.joint, r.count_i, r.count_j) == (1, 2, 1)


class TestTsv:
    def test_shape(self):
        text = to_tsv(pmi_pairs(build_cooccurrence({"d1": ["x y|v|z", "b"], "d2": ["b"]})))
        lines = text.splitlines()
        assert lines[0] == "key_i\tkey_j\tpmi\tjoint\tcount_i\tcount_j"
        assert lines[1].split("\t")[0] == "b"
        assert lines[1].split("\t")[1] == "x y|v|z"
        assert len(lines) == 2
