"""Skip-gram-with-negative-sampling embeddings for narrative keys.

Documents are sequences of narrative keys; every ordered pair of distinct
positions within a document is a (center, context) training pair (the
window is the whole document).  Negatives are drawn from the unigram
distribution raised to 0.75.  Training is deterministic for a given seed
and backend.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .._kernels import lcg_next, sgns_epoch

DEFAULT_DIM = 50
DEFAULT_EPOCHS = 10
DEFAULT_NEGATIVES = 5
DEFAULT_LR0 = 0.025
LR_FLOOR_FACTOR = 1e-4
NOISE_POWER = 0.75


@dataclass
class NarrativeEmbedding:
    """Trained key vectors plus the training configuration and loss trace."""

    dim: int
    keys: list[str]
    vectors: np.ndarray  # (V, dim) float64, rows parallel to ``keys``
    loss_history: list[float] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {k: i for i, k in enumerate(self.keys)}

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def vector(self, key: str) -> np.ndarray:
        return self.vectors[self._index[key]]


def build_vocabulary(docs: Sequence[Sequence[str]]) -> tuple[list[str], np.ndarray]:
    """Vocabulary in frequency order (descending, then key ascending) and
    the matching occurrence counts."""
    counts: Counter = Counter()
    for doc in docs:
        counts.update(doc)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    keys = [k for k, _ in ordered]
    freqs = np.array([n for _, n in ordered], dtype=np.float64)
    return keys, freqs


def _noise_cdf(freqs: np.ndarray) -> np.ndarray:
    probs = freqs ** NOISE_POWER
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return cdf


def _flatten(docs: Sequence[Sequence[str]], index: dict[str, int]) -> tuple[np.ndarray, np.ndarray]:
    flat = []
    offsets = [0]
    for doc in docs:
        flat.extend(index[k] for k in doc)
        offsets.append(len(flat))
    return np.array(flat, dtype=np.int64), np.array(offsets, dtype=np.int64)


def pairs_per_epoch(docs: Sequence[Sequence[str]]) -> int:
    return sum(len(doc) * (len(doc) - 1) for doc in docs)


def train_narrative_sgns(
    docs: Sequence[Sequence[str]],
    dim: int = DEFAULT_DIM,
    epochs: int = DEFAULT_EPOCHS,
    negatives: int = DEFAULT_NEGATIVES,
    lr0: float = DEFAULT_LR0,
    seed: int = 13,
) -> NarrativeEmbedding:
    """Train skip-gram embeddings over narrative documents.

    Center vectors start uniform in ``(-0.5/dim, 0.5/dim)``, context
    vectors at zero.  The learning rate decays linearly over all pairs of
    all epochs down to a floor of ``lr0 * 1e-4``.
    """
    if dim < 1 or epochs < 1 or negatives < 1 or lr0 <= 0:
        raise ValueError("invalid training configuration")
    keys, freqs = build_vocabulary(docs)
    if not keys:
        raise ValueError("no narrative keys to embed")
    index = {k: i for i, k in enumerate(keys)}
    flat, offsets = _flatten(docs, index)

    per_epoch = pairs_per_epoch(docs)
    if per_epoch == 0:
        raise ValueError("no training pairs: every document has fewer than 2 narratives")
    total_pairs = per_epoch * epochs

    rng = np.random.default_rng(seed)
    syn0 = (rng.random((len(keys), dim)) - 0.5) / dim
    syn1 = np.zeros((len(keys), dim))
    noise_cdf = _noise_cdf(freqs)

    state = lcg_next(seed & ((1 << 64) - 1))
    lr_min = lr0 * LR_FLOOR_FACTOR
    loss_history = []
    pairs_done = 0
    for _ in range(epochs):
        loss_sum, n_pairs, state = sgns_epoch(
            flat, offsets, syn0, syn1, noise_cdf, negatives,
            lr0, lr_min, total_pairs, pairs_done, state,
        )
        pairs_done += n_pairs
        loss_history.append(loss_sum / n_pairs)

    return NarrativeEmbedding(
        dim=dim,
        keys=keys,
        vectors=syn0,
        loss_history=loss_history,
        config={
            "dim": dim, "epochs": epochs, "negatives": negatives,
            "lr0": lr0, "seed": seed,
        },
    )


def nearest_narratives(
    embedding: NarrativeEmbedding, key: str, k: int = 20
) -> list[tuple[str, float]]:
    """The k nearest keys by cosine similarity (self excluded), ordered by
    similarity descending then key."""
    if key not in embedding:
        raise KeyError(f"unknown narrative key: {key!r}")
    target = embedding.vector(key)
    norms = np.linalg.norm(embedding.vectors, axis=1)
    tnorm = float(np.linalg.norm(target))
    sims = embedding.vectors @ target
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = np.where((norms > 0) & (tnorm > 0), sims / (norms * tnorm), 0.0)
    order = sorted(
        (i for i in range(len(embedding.keys)) if embedding.keys[i] != key),
        key=lambda i: (-sims[i], embedding.keys[i]),
    )
    return [(embedding.keys[i], float(sims[i])) for i in order[:k]]


NEIGHBORS_TSV_HEADER = "key\trank\tneighbor\tcosine"


def neighbors_to_tsv(embedding: NarrativeEmbedding, k: int = 20) -> str:
    """Top-k nearest neighbors of every key as TSV, keys in vocabulary
    (frequency) order."""
    lines = [NEIGHBORS_TSV_HEADER]
    for key in embedding.keys:
        for rank, (neighbor, cosine) in enumerate(nearest_narratives(embedding, key, k), 1):
            lines.append(f"{key}\t{rank}\t{neighbor}\t{cosine:.10g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reference loss/gradient for one training pair (used to cross-check the
# kernel updates by finite differences)
# ---------------------------------------------------------------------------


def _log_sigmoid(x: float) -> float:
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def pair_loss(v_center: np.ndarray, u_pos: np.ndarray, u_negs: np.ndarray) -> float:
    """Negative-sampling loss of one (center, context, negatives) triple."""
    loss = -_log_sigmoid(float(v_center @ u_pos))
    for u in u_negs:
        loss -= _log_sigmoid(-float(v_center @ u))
    return loss


def pair_grads(
    v_center: np.ndarray, u_pos: np.ndarray, u_negs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`pair_loss` w.r.t. each argument."""
    def sigmoid(x: float) -> float:
        if x >= 0:
            return 1.0 / (1.0 + math.exp(-x))
        e = math.exp(x)
        return e / (1.0 + e)

    p_pos = sigmoid(float(v_center @ u_pos))
    g_v = -(1.0 - p_pos) * u_pos
    g_pos = -(1.0 - p_pos) * v_center
    g_negs = np.zeros_like(u_negs)
    for i, u in enumerate(u_negs):
        p = sigmoid(float(v_center @ u))
        g_v = g_v + p * u
        g_negs[i] = p * v_center
    return g_v, g_pos, g_negs


# ---------------------------------------------------------------------------
# persistence: "<n> <dim>" header then "key v1 ... v_dim" rows
# ---------------------------------------------------------------------------


def save_embedding(path: str, embedding: NarrativeEmbedding) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(embedding.keys)} {embedding.dim}\n")
        for key, row in zip(embedding.keys, embedding.vectors):
            fh.write(key)
            for x in row:
                fh.write(f" {float(x)!r}")
            fh.write("\n")


def load_embedding(path: str) -> NarrativeEmbedding:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected '<n> <dim>' header")
        n, dim = int(header[0]), int(header[1])
        keys = []
        rows = []
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.rsplit(" ", dim)
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: bad embedding row for {parts[0]!r}")
            keys.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    if len(keys) != n:
        raise ValueError(f"{path}: header says {n} rows, found {len(keys)}")
    return NarrativeEmbedding(dim=dim, keys=keys, vectors=np.array(rows, dtype=np.float64))
