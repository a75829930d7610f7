"""Entity dimension reduction: named-entity vocabulary + phrase clusters.

Role phrases are mapped to a small set of entity labels in two steps:

1. phrases containing one of the L most frequent named entities get that
   entity's name as their label;
2. remaining phrases are embedded (frequency-weighted average of word
   vectors) and clustered with k-means; the cluster's label is its most
   frequent member phrase.

The fitted state (vocabulary, centroids, cluster labels, token
frequencies) persists as a single JSON model file.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ._kernels import assigned_sq_distances, kmeans_assign
from .ingest import NEMention, SentenceRecord
from .rolecore import MAX_PHRASE_TOKENS, CleanPhrase, clean_tokens

DEFAULT_SIF_A = 1e-3


# ---------------------------------------------------------------------------
# word vectors
# ---------------------------------------------------------------------------


@dataclass
class VectorTable:
    """Word vectors (token -> 1-D float64 array, all of one dimension) plus
    the corpus token frequencies used for inverse-frequency weighting."""

    dim: int
    vectors: dict[str, np.ndarray]
    token_freq: dict[str, int] = field(default_factory=dict)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def get(self, token: str) -> Optional[np.ndarray]:
        return self.vectors.get(token)

    @property
    def total_tokens(self) -> int:
        return sum(self.token_freq.values())

    def with_frequencies(self, token_freq: Mapping[str, int]) -> "VectorTable":
        """A view of the same vectors with different token frequencies."""
        return VectorTable(
            dim=self.dim, vectors=self.vectors, token_freq=dict(token_freq)
        )


def load_vectors(path: str) -> VectorTable:
    """Load text word vectors: one ``token v1 ... v_dim`` line per token."""
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2 or not parts[0]:
                if not line.strip():
                    continue
                raise ValueError(f"{path}:{line_no}: expected 'token v1 ... v_dim'")
            token = parts[0]
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise ValueError(f"{path}:{line_no}: non-numeric vector component") from None
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise ValueError(
                    f"{path}:{line_no}: dimension {vec.shape[0]} != {dim}"
                )
            vectors[token] = vec
    if dim is None:
        raise ValueError(f"{path}: no vectors found")
    return VectorTable(dim=dim, vectors=vectors)


# ---------------------------------------------------------------------------
# named-entity vocabulary
# ---------------------------------------------------------------------------


@dataclass
class EntityVocabulary:
    """The L most frequent cleaned named-entity phrases, in rank order
    (frequency descending, phrase ascending)."""

    entries: list[tuple[tuple[str, ...], int]] = field(default_factory=list)
    _rank: dict[tuple[str, ...], int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._rank and self.entries:
            self._rank = {tokens: i for i, (tokens, _) in enumerate(self.entries)}

    def __len__(self) -> int:
        return len(self.entries)

    def rank_of(self, tokens: tuple[str, ...]) -> Optional[int]:
        return self._rank.get(tokens)

    def phrases(self) -> list[str]:
        return [" ".join(tokens) for tokens, _ in self.entries]


def build_lemma_map(records: Iterable[SentenceRecord]) -> dict[str, str]:
    """Map lowercased token surfaces to their most frequent lemma in the
    corpus (ties broken by lexicographic order)."""
    counts: dict[str, Counter] = {}
    for record in records:
        for tok in record.tokens:
            low = tok.surface.lower()
            counts.setdefault(low, Counter())[tok.lemma.lower()] += 1
    out = {}
    for surface, lemmas in counts.items():
        best = max(sorted(lemmas), key=lambda lem: lemmas[lem])
        out[surface] = best
    return out


def clean_mention(
    mention: NEMention,
    stopwords: frozenset[str],
    lemma_for: Optional[Mapping[str, str]] = None,
    max_tokens: int = MAX_PHRASE_TOKENS,
) -> Optional[tuple[str, ...]]:
    """Clean a named-entity mention like a role phrase: whitespace-split the
    surface, map each token to its corpus lemma (identity when unknown),
    then apply the standard phrase-cleaning rules."""
    raw = mention.surface.split()
    if lemma_for:
        lemmas = [lemma_for.get(tok.lower(), tok.lower()) for tok in raw]
    else:
        lemmas = [tok.lower() for tok in raw]
    kept, _reason = clean_tokens(lemmas, stopwords, max_tokens)
    return kept


def build_ne_vocabulary(
    mentions: Iterable[NEMention],
    size: int,
    stopwords: frozenset[str],
    lemma_for: Optional[Mapping[str, str]] = None,
    max_tokens: int = MAX_PHRASE_TOKENS,
) -> EntityVocabulary:
    """Count cleaned named-entity mentions and keep the ``size`` most
    frequent (ties broken by phrase, ascending)."""
    counts: Counter = Counter()
    for mention in mentions:
        cleaned = clean_mention(mention, stopwords, lemma_for, max_tokens)
        if cleaned is not None:
            counts[cleaned] += 1
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return EntityVocabulary(entries=ordered[:size])


# ---------------------------------------------------------------------------
# resolved entities
# ---------------------------------------------------------------------------

NAMED = "named"
CLUSTERED = "clustered"


@dataclass(frozen=True)
class Entity:
    """A resolved entity: its label, how it was resolved (``named`` or
    ``clustered``), and the index into the vocabulary or cluster list."""

    label: str
    kind: str
    index: int


def match_named_entity(phrase: CleanPhrase, vocab: EntityVocabulary) -> Optional[Entity]:
    """The vocabulary entry occurring as a contiguous token subsequence of
    the phrase; when several match, the most frequent (lowest-ranked) one.
    ``None`` when no entry matches."""
    tokens = phrase.tokens
    best_rank: Optional[int] = None
    best_tokens: Optional[tuple[str, ...]] = None
    n = len(tokens)
    for i in range(n):
        for j in range(i + 1, n + 1):
            rank = vocab.rank_of(tokens[i:j])
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_tokens = tokens[i:j]
    if best_tokens is None or best_rank is None:
        return None
    return Entity(label=" ".join(best_tokens), kind=NAMED, index=best_rank)


# ---------------------------------------------------------------------------
# SIF phrase embedding
# ---------------------------------------------------------------------------


def sif_weight(p: float, a: float = DEFAULT_SIF_A) -> float:
    """Smooth inverse-frequency weight a / (a + p) for a token of relative
    frequency p."""
    return a / (a + p)


def sif_embed(
    phrase: CleanPhrase | Sequence[str],
    table: VectorTable,
    a: float = DEFAULT_SIF_A,
) -> Optional[np.ndarray]:
    """Embed a phrase as the average of SIF-weighted word vectors.

    Token weights are a/(a + p(t)) with p(t) the token's relative frequency
    per ``table.token_freq`` (weight 1 for all tokens when the table carries
    no frequencies).  Tokens without a vector are skipped; the average
    divides by the number of contributing tokens.  Returns ``None`` when no
    token has a vector.
    """
    tokens = phrase.tokens if isinstance(phrase, CleanPhrase) else tuple(phrase)
    total = table.total_tokens
    acc = np.zeros(table.dim)
    n = 0
    for token in tokens:
        vec = table.get(token)
        if vec is None:
            continue
        p = table.token_freq.get(token, 0) / total if total > 0 else 0.0
        acc += sif_weight(p, a) * vec
        n += 1
    if n == 0:
        return None
    return acc / n


# ---------------------------------------------------------------------------
# k-means clustering
# ---------------------------------------------------------------------------


@dataclass
class ClusterModel:
    """Fitted k-means state: centroids plus human-readable cluster labels."""

    k: int
    centroids: np.ndarray
    labels: list[str]
    inertia: float
    seed: int
    inertia_history: list[float] = field(default_factory=list)
    n_iter: int = 0


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = X[first]
    diff = X - centroids[0]
    d2 = np.einsum("ij,ij->i", diff, diff)
    for c in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining points coincide with chosen centroids; callers
            # guarantee k <= distinct rows, so this only pads exact ties
            idx = int(rng.integers(n))
        else:
            u = float(rng.random()) * total
            idx = int(np.searchsorted(np.cumsum(d2), u, side="right"))
            idx = min(idx, n - 1)
        centroids[c] = X[idx]
        diff = X - centroids[c]
        d2 = np.minimum(d2, np.einsum("ij,ij->i", diff, diff))
    return centroids


def _update_centroids(
    X: np.ndarray, labels: np.ndarray, k: int
) -> tuple[np.ndarray, list[int]]:
    dim = X.shape[1]
    sums = np.zeros((k, dim))
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    empty = [int(c) for c in np.flatnonzero(counts == 0)]
    nonzero = counts > 0
    centroids = np.zeros((k, dim))
    centroids[nonzero] = sums[nonzero] / counts[nonzero, None]
    return centroids, empty


def fit_kmeans(
    X: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = 100,
    tol: float = 1e-4,
) -> tuple[ClusterModel, np.ndarray]:
    """Lloyd's algorithm from a seeded k-means++ initialization.

    Runs until the relative inertia improvement drops below ``tol``,
    assignments stop changing, or ``max_iter`` update/assign rounds have
    run.  Empty clusters are re-seeded to the point farthest from its
    assigned centroid.  Returns the fitted model (labels are placeholder
    ``cluster_<id>`` names) and the final assignment of each row.
    """
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a non-empty 2-D array")
    n = X.shape[0]
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    distinct = np.unique(X, axis=0).shape[0]
    if k > distinct:
        raise ValueError(f"k ({k}) exceeds the number of distinct rows ({distinct})")

    rng = np.random.default_rng(seed)
    centroids = np.ascontiguousarray(_kmeanspp_init(X, k, rng))
    labels = kmeans_assign(X, centroids)
    inertia = float(assigned_sq_distances(X, centroids, labels).sum())
    history = [inertia]

    n_iter = 0
    for _ in range(max_iter):
        new_centroids, empty = _update_centroids(X, labels, k)
        if empty:
            d2 = assigned_sq_distances(X, centroids, labels)
            taken = set()
            for c in empty:
                order = np.argsort(-d2, kind="stable")
                for idx in order:
                    if int(idx) not in taken:
                        new_centroids[c] = X[int(idx)]
                        taken.add(int(idx))
                        break
        centroids = np.ascontiguousarray(new_centroids)
        new_labels = kmeans_assign(X, centroids)
        new_inertia = float(assigned_sq_distances(X, centroids, new_labels).sum())
        n_iter += 1
        history.append(new_inertia)
        converged = bool(np.array_equal(new_labels, labels))
        labels = new_labels
        if converged:
            inertia = new_inertia
            break
        if inertia > 0 and (inertia - new_inertia) / inertia < tol:
            inertia = new_inertia
            break
        inertia = new_inertia

    model = ClusterModel(
        k=k,
        centroids=centroids,
        labels=[f"cluster_{i}" for i in range(k)],
        inertia=inertia,
        seed=seed,
        inertia_history=history,
        n_iter=n_iter,
    )
    return model, labels


def nearest_centroid(vec: np.ndarray, centroids: np.ndarray) -> int:
    diff = centroids - vec
    d2 = np.einsum("ij,ij->i", diff, diff)
    return int(np.argmin(d2))


def label_clusters(
    model: ClusterModel,
    assigned_phrases: Iterable[tuple[str, int, int]],
    overrides: Optional[Mapping[int, str]] = None,
) -> None:
    """Name each cluster after its most frequent member phrase.

    ``assigned_phrases`` yields ``(phrase_string, cluster_id, count)``
    triples; ties break by phrase string, ascending.  Clusters with no
    members keep ``cluster_<id>``.  ``overrides`` wins over computed names.
    """
    best: dict[int, tuple[int, str]] = {}
    for text, cluster, count in assigned_phrases:
        if not 0 <= cluster < model.k:
            raise ValueError(f"cluster id {cluster} out of range [0, {model.k})")
        cur = best.get(cluster)
        if cur is None or (-count, text) < cur:
            best[cluster] = (-count, text)
    labels = []
    for i in range(model.k):
        if overrides and i in overrides:
            labels.append(overrides[i])
        elif i in best:
            labels.append(best[i][1])
        else:
            labels.append(f"cluster_{i}")
    model.labels = labels


def load_label_overrides(path: str) -> dict[int, str]:
    """Load cluster label overrides: ``cluster_id<TAB>label`` lines."""
    out: dict[int, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'cluster_id<TAB>label'")
            try:
                cluster = int(parts[0])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: cluster id must be an integer") from None
            out[cluster] = parts[1]
    return out


# ---------------------------------------------------------------------------
# resolution
# ---------------------------------------------------------------------------


def resolve_entity(
    phrase: CleanPhrase,
    vocab: EntityVocabulary,
    model: ClusterModel,
    table: VectorTable,
    a: float = DEFAULT_SIF_A,
) -> Optional[Entity]:
    """Resolve a cleaned phrase to an entity.

    A named-entity match always wins; otherwise the phrase is embedded and
    assigned to the nearest centroid.  ``None`` when the phrase neither
    matches the vocabulary nor has an embedding (or there are no clusters).
    """
    named = match_named_entity(phrase, vocab)
    if named is not None:
        return named
    if model.k == 0:
        return None
    vec = sif_embed(phrase, table, a)
    if vec is None:
        return None
    cluster = nearest_centroid(vec, model.centroids)
    return Entity(label=model.labels[cluster], kind=CLUSTERED, index=cluster)


@dataclass
class EntityModel:
    """Everything needed to map a cleaned phrase to an entity label."""

    vocabulary: EntityVocabulary
    clusters: ClusterModel
    token_freq: dict[str, int]
    sif_a: float
    dim: int

    def resolve(self, phrase: CleanPhrase, table: VectorTable) -> Optional[Entity]:
        if not table.token_freq:
            table = table.with_frequencies(self.token_freq)
        return resolve_entity(phrase, self.vocabulary, self.clusters, table, self.sif_a)


def save_entity_model(path: str, model: EntityModel) -> None:
    obj = {
        "version": 1,
        "dim": model.dim,
        "sif_a": model.sif_a,
        "seed": model.clusters.seed,
        "k": model.clusters.k,
        "inertia": model.clusters.inertia,
        "vocabulary": [
            [" ".join(tokens), freq] for tokens, freq in model.vocabulary.entries
        ],
        "cluster_labels": model.clusters.labels,
        "centroids": [[float(x) for x in row] for row in model.clusters.centroids],
        "token_freq": {tok: int(n) for tok, n in sorted(model.token_freq.items())},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def load_entity_model(path: str) -> EntityModel:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("version") != 1:
        raise ValueError(f"{path}: unsupported model version {obj.get('version')!r}")
    vocab = EntityVocabulary(
        entries=[(tuple(phrase.split(" ")), int(freq)) for phrase, freq in obj["vocabulary"]]
    )
    centroids = np.array(obj["centroids"], dtype=np.float64)
    if centroids.size == 0:
        centroids = centroids.reshape(0, obj["dim"])
    clusters = ClusterModel(
        k=int(obj["k"]),
        centroids=centroids,
        labels=list(obj["cluster_labels"]),
        inertia=float(obj["inertia"]),
        seed=int(obj["seed"]),
    )
    return EntityModel(
        vocabulary=vocab,
        clusters=clusters,
        token_freq={k: int(v) for k, v in obj["token_freq"].items()},
        sif_a=float(obj["sif_a"]),
        dim=int(obj["dim"]),
    )


# ---------------------------------------------------------------------------
# corpus-level fitting
# ---------------------------------------------------------------------------


@dataclass
class FitReport:
    """Counters from fitting the entity model."""

    mentions_total: int = 0
    vocab_size: int = 0
    phrase_instances: int = 0
    instances_ne_matched: int = 0
    instances_for_clustering: int = 0
    instances_sampled: int = 0
    instances_unembeddable: int = 0
    unique_phrases_clustered: int = 0
    k_effective: int = 0
    kmeans_iters: int = 0
    inertia: float = 0.0


def subsample_indices(n: int, frac: float, minimum: int, seed: int) -> np.ndarray:
    """Seeded subsample of ``range(n)``: at least ``minimum`` indices, at
    least ``ceil(frac * n)``, never more than ``n``; returned sorted."""
    size = min(n, max(int(math.ceil(frac * n)), minimum))
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=size, replace=False)
    return np.sort(idx)


def fit_entity_model(
    phrase_instances: Sequence[CleanPhrase],
    mentions: Iterable[NEMention],
    table: VectorTable,
    vocab_size: int,
    k: int,
    seed: int,
    stopwords: frozenset[str],
    lemma_for: Optional[Mapping[str, str]] = None,
    sif_a: float = DEFAULT_SIF_A,
    sample_frac: float = 0.05,
    max_iter: int = 100,
    tol: float = 1e-4,
    overrides: Optional[Mapping[int, str]] = None,
    report: Optional[FitReport] = None,
) -> EntityModel:
    """Fit the two-step entity model on a corpus of role-phrase instances.

    Named-entity matching removes instances covered by the vocabulary;
    the rest are SIF-embedded and clustered on a seeded instance subsample.
    Cluster labels come from assigning every unique remaining phrase.
    ``k`` is clamped to the number of distinct embedded sample rows.
    """
    if report is None:
        report = FitReport()

    mentions = list(mentions)
    report.mentions_total = len(mentions)
    vocab = build_ne_vocabulary(mentions, vocab_size, stopwords, lemma_for)
    report.vocab_size = len(vocab)

    token_freq: Counter = Counter()
    for phrase in phrase_instances:
        token_freq.update(phrase.tokens)
    ftable = table.with_frequencies(token_freq)

    report.phrase_instances = len(phrase_instances)
    residual: list[CleanPhrase] = []
    for phrase in phrase_instances:
        if match_named_entity(phrase, vocab) is not None:
            report.instances_ne_matched += 1
        else:
            residual.append(phrase)
    report.instances_for_clustering = len(residual)

    if not residual:
        clusters = ClusterModel(
            k=0, centroids=np.zeros((0, table.dim)), labels=[], inertia=0.0, seed=seed
        )
        return EntityModel(
            vocabulary=vocab,
            clusters=clusters,
            token_freq=dict(token_freq),
            sif_a=sif_a,
            dim=table.dim,
        )

    sample_idx = subsample_indices(len(residual), sample_frac, minimum=k, seed=seed)
    report.instances_sampled = len(sample_idx)

    embed_cache: dict[tuple[str, ...], Optional[np.ndarray]] = {}

    def embed(phrase: CleanPhrase | tuple[str, ...]) -> Optional[np.ndarray]:
        key = phrase.tokens if isinstance(phrase, CleanPhrase) else phrase
        if key not in embed_cache:
            embed_cache[key] = sif_embed(key, ftable, sif_a)
        return embed_cache[key]

    rows = []
    for i in sample_idx:
        vec = embed(residual[int(i)])
        if vec is None:
            report.instances_unembeddable += 1
        else:
            rows.append(vec)
    if not rows:
        raise ValueError("no sampled phrase instance has any word vector")
    X = np.vstack(rows)

    distinct = np.unique(X, axis=0).shape[0]
    k_eff = min(k, distinct)
    report.k_effective = k_eff
    clusters, _sample_assign = fit_kmeans(X, k_eff, seed=seed, max_iter=max_iter, tol=tol)
    report.kmeans_iters = clusters.n_iter
    report.inertia = clusters.inertia

    phrase_counts: Counter = Counter(p.tokens for p in residual)
    assigned: list[tuple[str, int, int]] = []
    for tokens in sorted(phrase_counts):
        vec = embed(tokens)
        if vec is None:
            continue
        cluster = nearest_centroid(vec, clusters.centroids)
        assigned.append((" ".join(tokens), cluster, phrase_counts[tokens]))
    report.unique_phrases_clustered = len(assigned)
    label_clusters(clusters, assigned, overrides)

    return EntityModel(
        vocabulary=vocab,
        clusters=clusters,
        token_freq=dict(token_freq),
        sif_a=sif_a,
        dim=table.dim,
    )
