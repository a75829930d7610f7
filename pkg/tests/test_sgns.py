"""Tests for skip-gram negative-sampling narrative embeddings."""

from __future__ import annotations

import numpy as np
import pytest

from narramine._kernels import (
    LCG_ADD,
    LCG_MULT,
    lcg_next,
    lcg_uniform,
    sgns_epoch,
    sgns_epoch_numpy,
)
from narramine.stats.sgns import (
    NarrativeEmbedding,
    build_vocabulary,
    load_embedding,
    nearest_narratives,
    neighbors_to_tsv,
    pair_grads,
    pair_loss,
    pairs_per_epoch,
    save_embedding,
    train_narrative_sgns,
)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))


class TestVocabulary:
    def test_frequency_order_then_key(self):
        docs = [["b", "a", "b"], ["c", "a", "b"]]
        keys, freqs = build_vocabulary(docs)
        assert keys == ["b", "a", "c"]
        assert freqs.tolist() == [3.0, 2.0, 1.0]

    def test_pairs_per_epoch(self):
        assert pairs_per_epoch([["a", "b", "c"], ["x"], []]) == 6
        assert pairs_per_epoch([["a", "b"]] * 3) == 6


class TestLCG:
    def test_recurrence(self):
        state = 42
        expected = (42 * LCG_MULT + LCG_ADD) % (1 << 64)
        assert lcg_next(state) == expected

    def test_uniform_in_unit_interval(self):
        state = 7
        seen = set()
        for _ in range(1000):
            state, u = lcg_uniform(state)
            assert 0.0 <= u < 1.0
            seen.add(u)
        assert len(seen) == 1000  # no short cycles


class TestGradients:
    def test_analytic_matches_finite_differences(self):
        rng = np.random.default_rng(88)
        eps = 1e-6
        for _ in range(10):
            v = rng.normal(size=8)
            u_pos = rng.normal(size=8)
            u_negs = rng.normal(size=(3, 8))
            g_v, g_pos, g_negs = pair_grads(v, u_pos, u_negs)

            def check(analytic, array, setter):
                for idx in np.ndindex(array.shape):
                    plus = array.copy()
                    plus[idx] += eps
                    minus = array.copy()
                    minus[idx] -= eps
                    numeric = (setter(plus) - setter(minus)) / (2 * eps)
                    denom = max(abs(numeric), abs(analytic[idx]), 1e-8)
                    assert abs(numeric - analytic[idx]) / denom < 1e-4

            check(g_v, v, lambda arr: pair_loss(arr, u_pos, u_negs))
            check(g_pos, u_pos, lambda arr: pair_loss(v, arr, u_negs))
            check(g_negs, u_negs, lambda arr: pair_loss(v, u_pos, arr))

    def test_loss_nonnegative(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            v = rng.normal(size=4)
            assert pair_loss(v, rng.normal(size=4), rng.normal(size=(2, 4))) > 0.0


class TestKernelEquivalence:
    def _inputs(self, seed=0):
        rng = np.random.default_rng(seed)
        flat = np.array([0, 1, 2, 1, 0, 3, 2, 1], dtype=np.int64)
        offsets = np.array([0, 4, 8], dtype=np.int64)
        syn0 = (rng.random((4, 6)) - 0.5) / 6
        syn1 = np.zeros((4, 6))
        freqs = np.array([4.0, 3.0, 2.0, 1.0])
        cdf = np.cumsum(freqs ** 0.75)
        cdf /= cdf[-1]
        return flat, offsets, syn0, syn1, cdf

    def test_active_backend_matches_numpy_reference(self):
        flat, offsets, syn0a, syn1a, cdf = self._inputs()
        syn0b, syn1b = syn0a.copy(), syn1a.copy()
        total = 24 * 3
        out_a = sgns_epoch(flat, offsets, syn0a, syn1a, cdf, 2, 0.05, 0.05e-4, total, 0, 99)
        out_b = sgns_epoch_numpy(flat, offsets, syn0b, syn1b, cdf, 2, 0.05, 0.05e-4, total, 0, 99)
        assert out_a[1] == out_b[1] == 24
        assert out_a[2] == out_b[2]
        assert out_a[0] == pytest.approx(out_b[0], rel=1e-12)
        assert np.allclose(syn0a, syn0b, atol=1e-14)
        assert np.allclose(syn1a, syn1b, atol=1e-14)

    def test_epoch_updates_in_place_and_reports_pairs(self):
        flat, offsets, syn0, syn1, cdf = self._inputs(1)
        before = syn0.copy()
        loss, n_pairs, state = sgns_epoch_numpy(
            flat, offsets, syn0, syn1, cdf, 2, 0.05, 5e-6, 24, 0, 7
        )
        assert n_pairs == pairs_per_epoch([[0, 1, 2, 1], [0, 3, 2, 1]])
        assert loss > 0
        assert state != 7
        assert not np.array_equal(syn0, before)


class TestTraining:
    DOCS = (
        [["tax|fund|school", "tax|fund|hospital"]] * 12
        + [["war|destroy|city", "war|kill|people"]] * 12
    )

    def test_deterministic(self):
        a = train_narrative_sgns(self.DOCS, dim=8, epochs=2, negatives=2, lr0=0.05, seed=5)
        b = train_narrative_sgns(self.DOCS, dim=8, epochs=2, negatives=2, lr0=0.05, seed=5)
        assert a.keys == b.keys
        assert np.array_equal(a.vectors, b.vectors)
        assert a.loss_history == b.loss_history
        c = train_narrative_sgns(self.DOCS, dim=8, epochs=2, negatives=2, lr0=0.05, seed=6)
        assert not np.array_equal(a.vectors, c.vectors)

    def test_shared_context_keys_end_up_closer(self):
        # a and b never co-occur but share both context keys; c lives in a
        # disjoint context, so cos(a, b) must beat cos(a, c)
        docs = (
            [["a", "m1", "m2"]] * 10
            + [["b", "m1", "m2"]] * 10
            + [["c", "z1", "z2"]] * 10
        )
        emb = train_narrative_sgns(docs, dim=8, epochs=40, negatives=3, lr0=0.1, seed=2)
        a, b, c = emb.vector("a"), emb.vector("b"), emb.vector("c")
        assert cosine(a, b) > cosine(a, c)
        assert cosine(a, b) > 0.9

    def test_loss_decreases_overall(self):
        emb = train_narrative_sgns(self.DOCS, dim=8, epochs=20, negatives=3, lr0=0.1, seed=2)
        assert emb.loss_history[-1] < emb.loss_history[0]

    def test_config_recorded(self):
        emb = train_narrative_sgns(self.DOCS, dim=4, epochs=1, negatives=1, lr0=0.05, seed=9)
        assert emb.config == {
            "dim": 4, "epochs": 1, "negatives": 1, "lr0": 0.05, "seed": 9,
        }

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dim": 0},
            {"epochs": 0},
            {"negatives": 0},
            {"lr0": 0.0},
            {"lr0": -0.1},
        ],
    )
    def test_invalid_config_rejected(self, kwargs):
        with pytest.raises(ValueError, match="invalid training configuration"):
            train_narrative_sgns(self.DOCS, **kwargs)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="no narrative keys"):
            train_narrative_sgns([])

    def test_singleton_docs_rejected(self):
        with pytest.raises(ValueError, match="no training pairs"):
            train_narrative_sgns([["a"], ["b"]])


class TestNeighbors:
    def _embedding(self) -> NarrativeEmbedding:
        vectors = np.array(
            [
                [1.0, 0.0],
                [0.9, 0.1],
                [0.0, 1.0],
                [-1.0, 0.0],
            ]
        )
        return NarrativeEmbedding(dim=2, keys=["a", "b", "c", "d"], vectors=vectors)

    def test_self_excluded_and_ordered(self):
        got = nearest_narratives(self._embedding(), "a", k=3)
        assert [k for k, _ in got] == ["b", "c", "d"]
        assert got[0][1] > got[1][1] > got[2][1]

    def test_k_caps_results(self):
        assert len(nearest_narratives(self._embedding(), "a", k=2)) == 2
        assert len(nearest_narratives(self._embedding(), "a", k=99)) == 3

    def test_unknown_key(self):
        with pytest.raises(KeyError, match="unknown narrative key"):
            nearest_narratives(self._embedding(), "zzz")

    def test_tie_breaks_by_key(self):
        vectors = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
        emb = NarrativeEmbedding(dim=2, keys=["q", "z", "m"], vectors=vectors)
        got = nearest_narratives(emb, "q", k=2)
        assert [k for k, _ in got] == ["m", "z"]

    def test_zero_vector_gets_zero_similarity(self):
        vectors = np.array([[1.0, 0.0], [0.0, 0.0]])
        emb = NarrativeEmbedding(dim=2, keys=["a", "b"], vectors=vectors)
        assert nearest_narratives(emb, "a", k=1) == [("b", 0.0)]

    def test_tsv_format(self):
        text = neighbors_to_tsv(self._embedding(), k=1)
        lines = text.splitlines()
        assert lines[0] == "key\trank\tneighbor\tcosine"
        assert lines[1].startswith("a\t1\tb\t")
        assert len(lines) == 5


class TestPersistence:
    def test_round_trip_exact(self, tmp_path):
        emb = train_narrative_sgns(
            [["people lose job|hit|x y", "a|b|c"]] * 4, dim=5, epochs=2, negatives=1, lr0=0.05, seed=1
        )
        path = tmp_path / "emb.txt"
        save_embedding(str(path), emb)
        loaded = load_embedding(str(path))
        assert loaded.keys == emb.keys
        assert loaded.dim == emb.dim
        # repr round-trip keeps every float bit-exact
        assert np.array_equal(loaded.vectors, emb.vectors)
        assert "people lose job|hit|x y" in loaded

    def test_header_checked(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("nope\n")
        with pytest.raises(ValueError, match="header"):
            load_embedding(str(path))

    def test_row_arity_checked(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("1 3\nkey 0.5 0.5\n")
        with pytest.raises(ValueError, match="bad embedding row"):
            load_embedding(str(path))

    def test_row_count_checked(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("2 2\nkey 0.5 0.5\n")
        with pytest.raises(ValueError, match="header says 2 rows"):
            load_embedding(str(path))
