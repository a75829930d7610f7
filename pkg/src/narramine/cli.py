"""Batch command-line pipeline.

Single stages run as subcommands (``roles``, ``entities fit``, ``stats
logodds``, ...), each reading and writing files, so any stage can be
re-run from persisted artifacts.  ``run`` drives all stages from one TOML
config and writes a run report with counters, per-file checksums, and
timings.

Exit codes: 0 success, 1 input error, 2 stage failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__, entities, ingest, narratives, rolecore
from . import graph as graphmod
from ._kernels import BACKEND
from .stats import classify as classifymod
from .stats import logodds as logoddsmod
from .stats import pmi as pmimod
from .stats import sentiment as sentimentmod
from .stats import sgns as sgnsmod

STAGE_ORDER = (
    "roles",
    "entities",
    "resolve",
    "narratives",
    "logodds",
    "divisiveness",
    "sentiment",
    "pmi",
    "embed",
    "classify",
    "graph",
)

STAGE_OUTPUTS = {
    "roles": ("roles.jsonl",),
    "entities": ("entity_model.json",),
    "resolve": ("resolved.jsonl",),
    "narratives": ("narratives.tsv", "narratives_provenance.jsonl"),
    "logodds": ("logodds.tsv",),
    "divisiveness": ("divisiveness.tsv",),
    "sentiment": ("sentiment.tsv",),
    "pmi": ("pmi.tsv",),
    "embed": ("embedding.txt", "neighbors.tsv"),
    "classify": ("classifier.json",),
    "graph": ("graph.json", "graph.dot", "graph.graphml", "centralities.tsv"),
}

REPORT_NAME = "run_report.json"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    # [paths]  (empty string means "use the packaged default" where one exists)
    annotations: str = ""
    metadata: str = ""
    vectors: str = ""
    stopwords: str = ""
    blacklist: str = ""
    lexicon: str = ""
    label_overrides: str = ""
    output_dir: str = "out"
    # [params]
    seed: int = 13
    meta_policy: str = "strict"
    mode: str = "AVP"
    ne_vocab_size: int = 1000
    n_clusters: int = 1000
    min_freq: int = 50
    sif_a: float = 1e-3
    sample_frac: float = 0.05
    kmeans_max_iter: int = 100
    kmeans_tol: float = 1e-4
    prior_scale: float = 1.0
    min_joint: int = 1
    min_narratives: int = 6
    min_per_side: int = 3
    eligibility_filter: bool = True
    neighbors_top_k: int = 20
    graph_top_k: int = 0  # 0 keeps every edge
    graph_largest_component: bool = False
    # [sgns]
    sgns_dim: int = 50
    sgns_epochs: int = 10
    sgns_negatives: int = 5
    sgns_lr0: float = 0.025
    # [classify]
    lambda_grid: tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0)
    test_frac: float = 0.25
    n_folds: int = 5
    logreg_tol: float = 1e-6
    logreg_max_iter: int = 5000
    # [stages]
    stages: dict = field(default_factory=lambda: {name: True for name in STAGE_ORDER})


_SECTION_FIELDS = {
    "paths": {
        "annotations": "annotations",
        "metadata": "metadata",
        "vectors": "vectors",
        "stopwords": "stopwords",
        "blacklist": "blacklist",
        "lexicon": "lexicon",
        "label_overrides": "label_overrides",
        "output_dir": "output_dir",
    },
    "params": {
        "seed": "seed",
        "meta_policy": "meta_policy",
        "mode": "mode",
        "ne_vocab_size": "ne_vocab_size",
        "n_clusters": "n_clusters",
        "min_freq": "min_freq",
        "sif_a": "sif_a",
        "sample_frac": "sample_frac",
        "kmeans_max_iter": "kmeans_max_iter",
        "kmeans_tol": "kmeans_tol",
        "prior_scale": "prior_scale",
        "min_joint": "min_joint",
        "min_narratives": "min_narratives",
        "min_per_side": "min_per_side",
        "eligibility_filter": "eligibility_filter",
        "neighbors_top_k": "neighbors_top_k",
        "graph_top_k": "graph_top_k",
        "graph_largest_component": "graph_largest_component",
    },
    "sgns": {
        "dim": "sgns_dim",
        "epochs": "sgns_epochs",
        "negatives": "sgns_negatives",
        "lr0": "sgns_lr0",
    },
    "classify": {
        "lambda_grid": "lambda_grid",
        "test_frac": "test_frac",
        "n_folds": "n_folds",
        "tol": "logreg_tol",
        "max_iter": "logreg_max_iter",
    },
}


class ConfigError(ValueError):
    """A pipeline configuration that cannot be used."""


_PATH_FIELDS = (
    "annotations", "metadata", "vectors", "stopwords",
    "blacklist", "lexicon", "label_overrides", "output_dir",
)


def load_config(path: str) -> PipelineConfig:
    """Parse a TOML config; relative paths resolve against the file's dir."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    cfg = config_from_dict(data, source=path)
    base = Path(path).resolve().parent
    for attr in _PATH_FIELDS:
        value = getattr(cfg, attr)
        if value and not Path(value).is_absolute():
            setattr(cfg, attr, str(base / value))
    return cfg


def config_from_dict(data: dict, source: str = "<config>") -> PipelineConfig:
    cfg = PipelineConfig()
    for section, values in data.items():
        if section == "stages":
            if not isinstance(values, dict):
                raise ConfigError(f"{source}: [stages] must be a table")
            for stage, enabled in values.items():
                if stage not in STAGE_ORDER:
                    raise ConfigError(
                        f"{source}: unknown stage {stage!r}; stages are {', '.join(STAGE_ORDER)}"
                    )
                if not isinstance(enabled, bool):
                    raise ConfigError(f"{source}: stages.{stage} must be true or false")
                cfg.stages[stage] = enabled
            continue
        fields = _SECTION_FIELDS.get(section)
        if fields is None:
            raise ConfigError(
                f"{source}: unknown section [{section}]; sections are "
                f"{', '.join(list(_SECTION_FIELDS) + ['stages'])}"
            )
        if not isinstance(values, dict):
            raise ConfigError(f"{source}: [{section}] must be a table")
        for key, value in values.items():
            attr = fields.get(key)
            if attr is None:
                raise ConfigError(f"{source}: unknown key {section}.{key}")
            _set_config_value(cfg, attr, value, f"{source}: {section}.{key}")
    validate_config(cfg)
    return cfg


def _set_config_value(cfg: PipelineConfig, attr: str, value, where: str) -> None:
    current = getattr(cfg, attr)
    if attr == "lambda_grid":
        if not isinstance(value, (list, tuple)) or not value or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
        ):
            raise ConfigError(f"{where}: must be a non-empty array of numbers")
        setattr(cfg, attr, tuple(float(x) for x in value))
        return
    if isinstance(current, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: must be true or false")
    elif isinstance(current, int):
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{where}: must be an integer")
    elif isinstance(current, float):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where}: must be a number")
        value = float(value)
    elif isinstance(current, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: must be a string")
    setattr(cfg, attr, value)


def apply_override(cfg: PipelineConfig, spec: str) -> None:
    """Apply one ``section.key=value`` override (value in TOML syntax)."""
    head, sep, raw = spec.partition("=")
    if not sep:
        raise ConfigError(f"--set needs section.key=value, got {spec!r}")
    section, dot, key = head.strip().partition(".")
    if not dot or not key:
        raise ConfigError(f"--set needs section.key=value, got {spec!r}")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    if section == "stages":
        if key not in STAGE_ORDER:
            raise ConfigError(f"--set: unknown stage {key!r}")
        if not isinstance(value, bool):
            raise ConfigError(f"--set: stages.{key} must be true or false")
        cfg.stages[key] = value
        return
    fields = _SECTION_FIELDS.get(section)
    if fields is None or key not in fields:
        raise ConfigError(f"--set: unknown config key {section}.{key}")
    _set_config_value(cfg, fields[key], value, f"--set {section}.{key}")


def validate_config(cfg: PipelineConfig) -> None:
    if cfg.mode not in narratives.MODES:
        raise ConfigError(f"params.mode must be one of {narratives.MODES}, got {cfg.mode!r}")
    if cfg.meta_policy not in ("strict", "drop_unmatched"):
        raise ConfigError("params.meta_policy must be 'strict' or 'drop_unmatched'")
    positive = [
        ("params.ne_vocab_size", cfg.ne_vocab_size),
        ("params.n_clusters", cfg.n_clusters),
        ("params.min_freq", cfg.min_freq),
        ("params.kmeans_max_iter", cfg.kmeans_max_iter),
        ("params.min_joint", cfg.min_joint),
        ("params.neighbors_top_k", cfg.neighbors_top_k),
        ("sgns.dim", cfg.sgns_dim),
        ("sgns.epochs", cfg.sgns_epochs),
        ("classify.n_folds", cfg.n_folds),
        ("classify.max_iter", cfg.logreg_max_iter),
    ]
    for name, value in positive:
        if value < 1:
            raise ConfigError(f"{name} must be >= 1, got {value}")
    if not (0.0 < cfg.sample_frac <= 1.0):
        raise ConfigError(f"params.sample_frac must be in (0, 1], got {cfg.sample_frac}")
    if cfg.sif_a <= 0:
        raise ConfigError(f"params.sif_a must be positive, got {cfg.sif_a}")
    if cfg.prior_scale <= 0:
        raise ConfigError(f"params.prior_scale must be positive, got {cfg.prior_scale}")
    if cfg.sgns_negatives < 1:
        raise ConfigError(f"sgns.negatives must be >= 1, got {cfg.sgns_negatives}")
    if cfg.sgns_lr0 <= 0:
        raise ConfigError(f"sgns.lr0 must be positive, got {cfg.sgns_lr0}")
    if not (0.0 < cfg.test_frac < 1.0):
        raise ConfigError(f"classify.test_frac must be in (0, 1), got {cfg.test_frac}")
    if cfg.graph_top_k < 0:
        raise ConfigError(f"params.graph_top_k must be >= 0, got {cfg.graph_top_k}")
    if cfg.min_narratives < 1 or cfg.min_per_side < 0:
        raise ConfigError("divisiveness eligibility thresholds out of range")


# ---------------------------------------------------------------------------
# shared input helpers
# ---------------------------------------------------------------------------


def _stopwords(path: str) -> frozenset[str]:
    return rolecore.load_stopwords(path) if path else rolecore.default_stopwords()


def _blacklist(path: str) -> frozenset[str]:
    return narratives.load_blacklist(path) if path else narratives.default_blacklist()


def _lexicon(path: str) -> sentimentmod.SentimentLexicon:
    return sentimentmod.load_lexicon(path) if path else sentimentmod.default_lexicon()


def _need(path: str, what: str, produced_by: Optional[str] = None) -> str:
    if not Path(path).exists():
        hint = f" (produced by stage '{produced_by}')" if produced_by else ""
        raise FileNotFoundError(f"{what} not found: {path}{hint}")
    return path


def _read_roleframes(path: str) -> list[rolecore.RoleFrame]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(rolecore.roleframe_from_obj(json.loads(line)))
    return out


def _read_resolved(path: str) -> list[narratives.ResolvedFrame]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(narratives.resolved_from_obj(json.loads(line)))
    return out


def _write_text(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------


def stage_roles(
    annotations: str,
    metadata: str,
    out_path: str,
    stopwords_path: str = "",
    meta_policy: str = "strict",
) -> dict:
    stopwords = _stopwords(stopwords_path)
    parse_report = ingest.ParseReport()
    records = ingest.read_records(_need(annotations, "annotations"), report=parse_report)
    meta = ingest.read_metadata_csv(_need(metadata, "metadata CSV"))
    joined, meta_dropped = ingest.join_metadata(records, meta, meta_policy)
    stats = rolecore.RoleStats()
    n_written = 0
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for record in joined:
            for frame in rolecore.extract_frames(record, stopwords, stats=stats):
                fh.write(json.dumps(rolecore.roleframe_to_obj(frame),
                                    ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
                n_written += 1
    return {
        "lines": parse_report.total,
        "records_parsed": parse_report.parsed,
        "records_invalid": parse_report.invalid,
        "records_meta_dropped": meta_dropped,
        "frames_in": stats.frames_in,
        "frames_kept": stats.frames_kept,
        "frames_dropped_no_roles": stats.frames_dropped_no_roles,
        "roles_kept": stats.roles_kept,
        "roles_dropped_empty": stats.roles_dropped_empty,
        "roles_dropped_too_long": stats.roles_dropped_too_long,
        "roleframes_written": n_written,
    }


def stage_entities_fit(
    roles_path: str,
    annotations: str,
    vectors_path: str,
    out_model: str,
    stopwords_path: str = "",
    vocab_size: int = 1000,
    n_clusters: int = 1000,
    seed: int = 13,
    sif_a: float = 1e-3,
    sample_frac: float = 0.05,
    max_iter: int = 100,
    tol: float = 1e-4,
    overrides_path: str = "",
) -> dict:
    stopwords = _stopwords(stopwords_path)
    table = entities.load_vectors(_need(vectors_path, "word vectors"))
    frames = _read_roleframes(_need(roles_path, "role frames", produced_by="roles"))
    records = ingest.read_records(_need(annotations, "annotations"))

    phrases: list[rolecore.CleanPhrase] = []
    for frame in frames:
        for phrase in (frame.agent, frame.patient, frame.attribute):
            if phrase is not None:
                phrases.append(phrase)

    mentions = [m for record in records for m in record.ents]
    lemma_for = entities.build_lemma_map(records)
    overrides = entities.load_label_overrides(overrides_path) if overrides_path else None

    report = entities.FitReport()
    model = entities.fit_entity_model(
        phrases,
        mentions,
        table,
        vocab_size=vocab_size,
        k=n_clusters,
        seed=seed,
        stopwords=stopwords,
        lemma_for=lemma_for,
        sif_a=sif_a,
        sample_frac=sample_frac,
        max_iter=max_iter,
        tol=tol,
        overrides=overrides,
        report=report,
    )
    Path(out_model).parent.mkdir(parents=True, exist_ok=True)
    entities.save_entity_model(out_model, model)
    return {
        "mentions_total": report.mentions_total,
        "vocab_size": report.vocab_size,
        "phrase_instances": report.phrase_instances,
        "instances_ne_matched": report.instances_ne_matched,
        "instances_for_clustering": report.instances_for_clustering,
        "instances_sampled": report.instances_sampled,
        "instances_unembeddable": report.instances_unembeddable,
        "unique_phrases_clustered": report.unique_phrases_clustered,
        "k_requested": n_clusters,
        "k_effective": report.k_effective,
        "kmeans_iterations": report.kmeans_iters,
        "inertia": report.inertia,
    }


def stage_resolve(
    roles_path: str,
    model_path: str,
    vectors_path: str,
    out_path: str,
) -> dict:
    model = entities.load_entity_model(_need(model_path, "entity model", produced_by="entities"))
    table = entities.load_vectors(_need(vectors_path, "word vectors"))
    frames = _read_roleframes(_need(roles_path, "role frames", produced_by="roles"))
    counters = Counter()
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for frame in frames:
            counters["frames"] += 1
            labels: dict[str, Optional[str]] = {}
            for name, phrase in (
                ("agent", frame.agent),
                ("patient", frame.patient),
                ("attribute", frame.attribute),
            ):
                if phrase is None:
                    labels[name] = None
                    continue
                counters["roles_in"] += 1
                entity = model.resolve(phrase, table)
                if entity is None:
                    counters["roles_unresolved"] += 1
                    labels[name] = None
                else:
                    counters[f"roles_resolved_{entity.kind}"] += 1
                    labels[name] = entity.label
            resolved = narratives.ResolvedFrame(
                verb=frame.verb.text,
                agent=labels["agent"],
                patient=labels["patient"],
                attribute=labels["attribute"],
                modal=frame.verb.modal,
                doc_id=frame.doc_id,
                sent_id=frame.sent_id,
                speaker=frame.speaker,
                party=frame.party,
                year=frame.year,
            )
            fh.write(json.dumps(narratives.resolved_to_obj(resolved),
                                ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
    return {
        "frames": counters["frames"],
        "roles_in": counters["roles_in"],
        "roles_resolved_named": counters["roles_resolved_named"],
        "roles_resolved_clustered": counters["roles_resolved_clustered"],
        "roles_unresolved": counters["roles_unresolved"],
    }


def stage_narratives(
    resolved_path: str,
    out_tsv: str,
    out_provenance: str,
    mode: str = "AVP",
    min_freq: int = 50,
    blacklist_path: str = "",
) -> dict:
    frames = _read_resolved(_need(resolved_path, "resolved frames", produced_by="resolve"))
    blacklist = _blacklist(blacklist_path)
    astats = narratives.AssemblyStats()
    statements = narratives.assemble_statements(frames, mode=mode, stats=astats)
    counts = narratives.count_and_filter(statements, min_freq=min_freq, blacklist=blacklist)
    _write_text(out_tsv, narratives.to_tsv(counts))
    Path(out_provenance).parent.mkdir(parents=True, exist_ok=True)
    narratives.write_provenance(out_provenance, counts)
    return {
        "frames_in": astats.frames_in,
        "dropped_no_agent": astats.dropped_no_agent,
        "dropped_no_object": astats.dropped_no_object,
        "statements": astats.statements_out,
        "statements_blacklisted": counts.statements_blacklisted,
        "statements_counted": counts.statements_counted,
        "keys_below_min": counts.keys_below_min,
        "narratives": len(counts.rows),
    }


def _party_counts(counts: narratives.NarrativeCounts) -> tuple[dict[str, int], dict[str, int]]:
    rep = {key: row.by_party.get("R", 0) for key, row in counts.rows.items()}
    dem = {key: row.by_party.get("D", 0) for key, row in counts.rows.items()}
    return rep, dem


def stage_logodds(narratives_tsv: str, out_tsv: str, prior_scale: float = 1.0) -> dict:
    with open(_need(narratives_tsv, "narratives TSV", produced_by="narratives"),
              "r", encoding="utf-8") as fh:
        counts = narratives.parse_tsv(fh.read())
    rep, dem = _party_counts(counts)
    results = logoddsmod.log_odds(rep, dem, prior_scale=prior_scale)
    _write_text(out_tsv, logoddsmod.to_tsv(results))
    return {"keys_in": len(counts.rows), "keys_scored": len(results)}


def stage_divisiveness(
    narratives_tsv: str,
    logodds_tsv: str,
    out_tsv: str,
    prior_scale: float = 1.0,
    min_narratives: int = 6,
    min_per_side: int = 3,
    eligibility_filter: bool = True,
) -> dict:
    with open(_need(narratives_tsv, "narratives TSV", produced_by="narratives"),
              "r", encoding="utf-8") as fh:
        counts = narratives.parse_tsv(fh.read())
    with open(_need(logodds_tsv, "log-odds TSV", produced_by="logodds"),
              "r", encoding="utf-8") as fh:
        narrative_scores = logoddsmod.parse_tsv(fh.read())

    membership: dict[str, set[str]] = {}
    ent_rep: Counter = Counter()
    ent_dem: Counter = Counter()
    for key, row in counts.rows.items():
        rep = row.by_party.get("R", 0)
        dem = row.by_party.get("D", 0)
        for label in (row.agent, row.patient):
            membership.setdefault(label, set()).add(key)
            ent_rep[label] += rep
            ent_dem[label] += dem
    entity_scores = logoddsmod.log_odds(ent_rep, ent_dem, prior_scale=prior_scale)

    eligibility = (
        logoddsmod.Eligibility(min_narratives=min_narratives, min_per_side=min_per_side)
        if eligibility_filter
        else None
    )
    scores = logoddsmod.entity_divisiveness(
        list(narrative_scores.values()),
        {r.key: r for r in entity_scores},
        membership,
        eligibility,
    )
    _write_text(out_tsv, logoddsmod.divisiveness_to_tsv(scores))
    return {"entities": len(membership), "entities_scored": len(scores)}


def stage_sentiment(
    provenance_path: str,
    annotations: str,
    out_tsv: str,
    lexicon_path: str = "",
) -> dict:
    provenance = narratives.read_provenance(
        _need(provenance_path, "narrative provenance", produced_by="narratives")
    )
    lexicon = _lexicon(lexicon_path)
    records = ingest.read_records(_need(annotations, "annotations"))
    sentence_tokens = {
        (r.doc_id, r.sent_id): [t.surface.lower() for t in r.tokens] for r in records
    }
    narrative_sentences = {key: info["sentences"] for key, info in provenance.items()}
    scores = sentimentmod.narrative_sentiment(narrative_sentences, sentence_tokens, lexicon)
    n_sentences = {key: len(info["sentences"]) for key, info in provenance.items()}
    _write_text(out_tsv, sentimentmod.to_tsv(scores, n_sentences))
    return {"narratives": len(scores), "lexicon_tokens": len(lexicon.valences)}


def stage_pmi(provenance_path: str, out_tsv: str, min_joint: int = 1) -> dict:
    provenance = narratives.read_provenance(
        _need(provenance_path, "narrative provenance", produced_by="narratives")
    )
    doc_keys: dict[str, set[str]] = {}
    for key, info in provenance.items():
        for doc_id, _sent_id in info["sentences"]:
            doc_keys.setdefault(doc_id, set()).add(key)
    table = pmimod.build_cooccurrence(doc_keys)
    results = pmimod.pmi_pairs(table, min_joint=min_joint)
    _write_text(out_tsv, pmimod.to_tsv(results))
    return {"documents": table.n_docs, "keys": len(table.doc_count), "pairs": len(results)}


def stage_embed(
    resolved_path: str,
    narratives_tsv: str,
    out_embedding: str,
    out_neighbors: str,
    mode: str = "AVP",
    dim: int = 50,
    epochs: int = 10,
    negatives: int = 5,
    lr0: float = 0.025,
    seed: int = 13,
    top_k: int = 20,
) -> dict:
    frames = _read_resolved(_need(resolved_path, "resolved frames", produced_by="resolve"))
    with open(_need(narratives_tsv, "narratives TSV", produced_by="narratives"),
              "r", encoding="utf-8") as fh:
        surviving = set(narratives.parse_tsv(fh.read()).rows)

    statements = narratives.assemble_statements(frames, mode=mode)
    doc_order: list[str] = []
    docs_map: dict[str, list[str]] = {}
    for st in statements:
        if st.key not in surviving:
            continue
        if st.doc_id not in docs_map:
            docs_map[st.doc_id] = []
            doc_order.append(st.doc_id)
        docs_map[st.doc_id].append(st.key)
    docs = [docs_map[d] for d in doc_order]

    embedding = sgnsmod.train_narrative_sgns(
        docs, dim=dim, epochs=epochs, negatives=negatives, lr0=lr0, seed=seed
    )
    Path(out_embedding).parent.mkdir(parents=True, exist_ok=True)
    sgnsmod.save_embedding(out_embedding, embedding)

    _write_text(out_neighbors, sgnsmod.neighbors_to_tsv(embedding, k=top_k))

    return {
        "documents": len(docs),
        "keys": len(embedding.keys),
        "pairs_per_epoch": sgnsmod.pairs_per_epoch(docs),
        "first_epoch_loss": embedding.loss_history[0],
        "last_epoch_loss": embedding.loss_history[-1],
    }


def stage_classify(
    provenance_path: str,
    metadata: str,
    out_json: str,
    lambda_grid: Sequence[float] = (0.01, 0.1, 1.0, 10.0, 100.0),
    seed: int = 13,
    test_frac: float = 0.25,
    n_folds: int = 5,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> dict:
    provenance = narratives.read_provenance(
        _need(provenance_path, "narrative provenance", produced_by="narratives")
    )
    meta = ingest.read_metadata_csv(_need(metadata, "metadata CSV"))
    party_of: dict[str, str] = {}
    for row in meta:
        prev = party_of.get(row.speaker)
        if prev is not None and prev != row.party:
            raise ingest.MetadataError(
                f"speaker {row.speaker!r} has conflicting parties {prev!r} and {row.party!r}"
            )
        party_of[row.speaker] = row.party

    features: dict[str, dict[str, float]] = {}
    for key, info in provenance.items():
        for speaker, count in info["speakers"].items():
            features.setdefault(speaker, {})[key] = float(count)

    labels = {
        speaker: party_of[speaker]
        for speaker in features
        if party_of.get(speaker) in (classifymod.NEGATIVE_CLASS, classifymod.POSITIVE_CLASS)
    }
    if not labels:
        raise ValueError("no speaker with narratives has a D or R label")

    result = classifymod.fit_partisanship_classifier(
        {s: features[s] for s in labels},
        labels,
        lambda_grid=lambda_grid,
        seed=seed,
        test_frac=test_frac,
        n_folds=n_folds,
        tol=tol,
        max_iter=max_iter,
    )
    Path(out_json).parent.mkdir(parents=True, exist_ok=True)
    classifymod.save_classifier(out_json, result)
    return {
        "speakers": len(labels),
        "features": len(result.model.feature_names),
        "best_lambda": result.best_lambda,
        "cv_accuracy": result.cv_mean_accuracy[result.best_lambda],
        "test_accuracy": result.test_accuracy,
        "converged": result.converged,
        "iterations": result.n_iterations,
    }


def stage_graph(
    narratives_tsv: str,
    logodds_tsv: str,
    out_json: str,
    out_dot: str,
    out_graphml: str,
    out_centralities: str,
    top_k: int = 0,
    largest_component: bool = False,
) -> dict:
    with open(_need(narratives_tsv, "narratives TSV", produced_by="narratives"),
              "r", encoding="utf-8") as fh:
        counts = narratives.parse_tsv(fh.read())
    scores = None
    if logodds_tsv:
        with open(_need(logodds_tsv, "log-odds TSV", produced_by="logodds"),
                  "r", encoding="utf-8") as fh:
            scores = logoddsmod.parse_tsv(fh.read())
    g = graphmod.build_graph(counts, scores)
    if top_k > 0 or largest_component:
        g = graphmod.prune(g, top_k=top_k if top_k > 0 else None,
                           largest_component=largest_component)
    cents = graphmod.centralities(g)
    _write_text(out_json, graphmod.to_json(g))
    _write_text(out_dot, graphmod.to_dot(g))
    _write_text(out_graphml, graphmod.to_graphml(g))
    _write_text(out_centralities, graphmod.centralities_to_tsv(cents))
    return {"vertices": g.n_vertices(), "edges": g.n_edges()}


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------


class StageFailure(RuntimeError):
    """A pipeline stage raised mid-run; the run report records which one."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}' failed: {message}")
        self.stage = stage


def _check_pipeline_inputs(cfg: PipelineConfig) -> None:
    """Fail on any missing input file before the first stage runs."""
    enabled = {name for name in STAGE_ORDER if cfg.stages.get(name, True)}
    required = (
        (cfg.annotations, "annotations", {"roles", "entities", "sentiment"}),
        (cfg.metadata, "speaker metadata", {"roles", "classify"}),
        (cfg.vectors, "token vectors", {"entities", "resolve"}),
    )
    for path, what, users in required:
        if users & enabled:
            _need(path, what)
    optional = (
        (cfg.stopwords, "stopword list", {"roles", "entities"}),
        (cfg.blacklist, "label blacklist", {"narratives"}),
        (cfg.lexicon, "sentiment lexicon", {"sentiment"}),
        (cfg.label_overrides, "label overrides", {"entities"}),
    )
    for path, what, users in optional:
        if path and users & enabled:
            _need(path, what)


def run_pipeline(cfg: PipelineConfig, resume: bool = False) -> dict:
    """Run every enabled stage in order; returns the run report dict."""
    _check_pipeline_inputs(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def p(name: str) -> str:
        return str(out / name)

    seeds = {
        "root": cfg.seed,
        "entities": cfg.seed,
        "embed": cfg.seed + 1,
        "classify": cfg.seed + 2,
    }

    def run_stage(name: str) -> dict:
        if name == "roles":
            return stage_roles(cfg.annotations, cfg.metadata, p("roles.jsonl"),
                               cfg.stopwords, cfg.meta_policy)
        if name == "entities":
            return stage_entities_fit(
                p("roles.jsonl"), cfg.annotations, cfg.vectors, p("entity_model.json"),
                stopwords_path=cfg.stopwords, vocab_size=cfg.ne_vocab_size,
                n_clusters=cfg.n_clusters, seed=seeds["entities"], sif_a=cfg.sif_a,
                sample_frac=cfg.sample_frac, max_iter=cfg.kmeans_max_iter,
                tol=cfg.kmeans_tol, overrides_path=cfg.label_overrides,
            )
        if name == "resolve":
            return stage_resolve(p("roles.jsonl"), p("entity_model.json"),
                                 cfg.vectors, p("resolved.jsonl"))
        if name == "narratives":
            return stage_narratives(p("resolved.jsonl"), p("narratives.tsv"),
                                    p("narratives_provenance.jsonl"), cfg.mode,
                                    cfg.min_freq, cfg.blacklist)
        if name == "logodds":
            return stage_logodds(p("narratives.tsv"), p("logodds.tsv"), cfg.prior_scale)
        if name == "divisiveness":
            return stage_divisiveness(
                p("narratives.tsv"), p("logodds.tsv"), p("divisiveness.tsv"),
                cfg.prior_scale, cfg.min_narratives, cfg.min_per_side,
                cfg.eligibility_filter,
            )
        if name == "sentiment":
            return stage_sentiment(p("narratives_provenance.jsonl"), cfg.annotations,
                                   p("sentiment.tsv"), cfg.lexicon)
        if name == "pmi":
            return stage_pmi(p("narratives_provenance.jsonl"), p("pmi.tsv"), cfg.min_joint)
        if name == "embed":
            return stage_embed(
                p("resolved.jsonl"), p("narratives.tsv"), p("embedding.txt"),
                p("neighbors.tsv"), mode=cfg.mode, dim=cfg.sgns_dim,
                epochs=cfg.sgns_epochs, negatives=cfg.sgns_negatives,
                lr0=cfg.sgns_lr0, seed=seeds["embed"], top_k=cfg.neighbors_top_k,
            )
        if name == "classify":
            return stage_classify(
                p("narratives_provenance.jsonl"), cfg.metadata, p("classifier.json"),
                lambda_grid=cfg.lambda_grid, seed=seeds["classify"],
                test_frac=cfg.test_frac, n_folds=cfg.n_folds,
                tol=cfg.logreg_tol, max_iter=cfg.logreg_max_iter,
            )
        if name == "graph":
            return stage_graph(
                p("narratives.tsv"), p("logodds.tsv"), p("graph.json"), p("graph.dot"),
                p("graph.graphml"), p("centralities.tsv"),
                top_k=cfg.graph_top_k, largest_component=cfg.graph_largest_component,
            )
        raise ValueError(f"unknown stage {name!r}")

    config_dict = dataclasses.asdict(cfg)
    config_dict["lambda_grid"] = list(cfg.lambda_grid)
    report = {
        "version": __version__,
        "backend": BACKEND,
        "seeds": seeds,
        "config": config_dict,
        "stages": {},
    }
    def write_report() -> None:
        with open(p(REPORT_NAME), "w", encoding="utf-8") as fh:
            json.dump(report, fh, ensure_ascii=False, indent=1, sort_keys=True)
            fh.write("\n")

    for name in STAGE_ORDER:
        entry: dict = {"enabled": bool(cfg.stages.get(name, True))}
        if not entry["enabled"]:
            entry["ran"] = False
            entry["outputs"] = {}
            report["stages"][name] = entry
            continue
        outputs = [p(f) for f in STAGE_OUTPUTS[name]]
        if resume and all(Path(o).exists() for o in outputs):
            entry["ran"] = False
            entry["resumed"] = True
        else:
            started = time.perf_counter()
            try:
                entry["counters"] = run_stage(name)
            except Exception as exc:
                entry["duration_s"] = round(time.perf_counter() - started, 6)
                entry["ran"] = True
                entry["failed"] = True
                entry["error"] = str(exc)
                report["stages"][name] = entry
                report["failed_stage"] = name
                write_report()
                raise StageFailure(name, str(exc)) from exc
            entry["duration_s"] = round(time.perf_counter() - started, 6)
            entry["ran"] = True
        entry["outputs"] = {
            rel: _sha256(p(rel)) for rel in STAGE_OUTPUTS[name] if Path(p(rel)).exists()
        }
        report["stages"][name] = entry

    write_report()
    return report


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narramine",
        description="Mine who-does-what-to-whom narratives from role-annotated text.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("validate", help="check a JSONL corpus against the sentence schema")
    s.add_argument("--input", required=True, help="annotations JSONL")
    s.add_argument("--max-errors", type=int, default=10,
                   help="how many line errors to print (default 10)")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("roles", help="reduce annotated sentences to role frames")
    s.add_argument("--input", required=True, help="annotations JSONL")
    s.add_argument("--meta", required=True, help="speaker metadata CSV")
    s.add_argument("--output", required=True, help="role frames JSONL to write")
    s.add_argument("--stopwords", default="", help="stopword list (default: packaged)")
    s.add_argument("--meta-policy", choices=("strict", "drop_unmatched"), default="strict")
    s.set_defaults(func=cmd_roles)

    ent = sub.add_parser("entities", help="fit or apply the entity model")
    ent_sub = ent.add_subparsers(dest="entities_command", required=True, metavar="action")

    s = ent_sub.add_parser("fit", help="fit vocabulary + clusters from role frames")
    s.add_argument("--roles", required=True, help="role frames JSONL")
    s.add_argument("--annotations", required=True, help="annotations JSONL (for mentions)")
    s.add_argument("--vectors", required=True, help="word vector text file")
    s.add_argument("--output", required=True, help="entity model JSON to write")
    s.add_argument("--stopwords", default="")
    s.add_argument("--vocab-size", type=int, default=1000)
    s.add_argument("--clusters", type=int, default=1000)
    s.add_argument("--seed", type=int, default=13)
    s.add_argument("--sif-a", type=float, default=1e-3)
    s.add_argument("--sample-frac", type=float, default=0.05)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--tol", type=float, default=1e-4)
    s.add_argument("--label-overrides", default="",
                   help="cluster_id<TAB>label file applied at labeling time")
    s.set_defaults(func=cmd_entities_fit)

    s = ent_sub.add_parser("resolve", help="map role phrases to entity labels")
    s.add_argument("--roles", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--vectors", required=True)
    s.add_argument("--output", required=True, help="resolved frames JSONL to write")
    s.set_defaults(func=cmd_entities_resolve)

    s = sub.add_parser("narratives", help="assemble, count, and filter narrative statements")
    s.add_argument("--resolved", required=True, help="resolved frames JSONL")
    s.add_argument("--output", required=True, help="narratives TSV to write")
    s.add_argument("--provenance", required=True, help="per-key sentence JSONL to write")
    s.add_argument("--mode", choices=narratives.MODES, default="AVP")
    s.add_argument("--min-freq", type=int, default=50)
    s.add_argument("--blacklist", default="", help="label blacklist (default: packaged)")
    s.set_defaults(func=cmd_narratives)

    st = sub.add_parser("stats", help="statistics over counted narratives")
    st_sub = st.add_subparsers(dest="stats_command", required=True, metavar="analysis")

    s = st_sub.add_parser("logodds", help="partisanship log-odds per narrative")
    s.add_argument("--narratives", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--prior-scale", type=float, default=1.0)
    s.set_defaults(func=cmd_stats_logodds)

    s = st_sub.add_parser("divisiveness", help="entity divisiveness scores")
    s.add_argument("--narratives", required=True)
    s.add_argument("--logodds", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--prior-scale", type=float, default=1.0)
    s.add_argument("--min-narratives", type=int, default=6)
    s.add_argument("--min-per-side", type=int, default=3)
    s.add_argument("--no-eligibility", action="store_true",
                   help="score every entity regardless of evidence")
    s.set_defaults(func=cmd_stats_divisiveness)

    s = st_sub.add_parser("sentiment", help="mean sentence sentiment per narrative")
    s.add_argument("--provenance", required=True)
    s.add_argument("--annotations", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--lexicon", default="", help="token<TAB>valence file (default: packaged)")
    s.set_defaults(func=cmd_stats_sentiment)

    s = st_sub.add_parser("pmi", help="document-level PMI between narratives")
    s.add_argument("--provenance", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--min-joint", type=int, default=1)
    s.set_defaults(func=cmd_stats_pmi)

    s = st_sub.add_parser("embed", help="skip-gram embeddings of narratives")
    s.add_argument("--resolved", required=True)
    s.add_argument("--narratives", required=True)
    s.add_argument("--output", required=True, help="embedding text file to write")
    s.add_argument("--neighbors", required=True, help="nearest-neighbor TSV to write")
    s.add_argument("--mode", choices=narratives.MODES, default="AVP")
    s.add_argument("--dim", type=int, default=50)
    s.add_argument("--epochs", type=int, default=10)
    s.add_argument("--negatives", type=int, default=5)
    s.add_argument("--lr0", type=float, default=0.025)
    s.add_argument("--seed", type=int, default=13)
    s.add_argument("--top-k", type=int, default=20)
    s.set_defaults(func=cmd_stats_embed)

    s = st_sub.add_parser("classify", help="speaker partisanship classifier")
    s.add_argument("--provenance", required=True)
    s.add_argument("--meta", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--lambda-grid", default="0.01,0.1,1.0,10.0,100.0",
                   help="comma-separated L2 strengths")
    s.add_argument("--seed", type=int, default=13)
    s.add_argument("--test-frac", type=float, default=0.25)
    s.add_argument("--folds", type=int, default=5)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=5000)
    s.set_defaults(func=cmd_stats_classify)

    gr = sub.add_parser("graph", help="build, prune, or export the narrative graph")
    gr_sub = gr.add_subparsers(dest="graph_command", required=True, metavar="action")

    s = gr_sub.add_parser("build", help="narratives TSV -> graph JSON + centralities")
    s.add_argument("--narratives", required=True)
    s.add_argument("--logodds", default="", help="attach partisanship scores to edges")
    s.add_argument("--output", required=True, help="graph JSON to write")
    s.add_argument("--dot", default="", help="also write DOT here")
    s.add_argument("--graphml", default="", help="also write GraphML here")
    s.add_argument("--centralities", default="", help="also write centrality TSV here")
    s.set_defaults(func=cmd_graph_build)

    s = gr_sub.add_parser("prune", help="keep top edges / largest component")
    s.add_argument("--input", required=True, help="graph JSON")
    s.add_argument("--output", required=True, help="pruned graph JSON to write")
    s.add_argument("--top-k", type=int, default=0, help="keep this many edges (0 = all)")
    s.add_argument("--largest-component", action="store_true")
    s.set_defaults(func=cmd_graph_prune)

    s = gr_sub.add_parser("export", help="render graph JSON as dot/graphml/json")
    s.add_argument("--input", required=True, help="graph JSON")
    s.add_argument("--format", required=True, choices=graphmod.EXPORT_FORMATS)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_graph_export)

    s = sub.add_parser("run", help="run the whole pipeline from a TOML config")
    s.add_argument("--config", required=True, help="pipeline TOML")
    s.add_argument("--output-dir", default="", help="override paths.output_dir")
    s.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="SECTION.KEY=VALUE", help="override any config value")
    s.add_argument("--resume", action="store_true",
                   help="skip stages whose outputs already exist")
    s.set_defaults(func=cmd_run)

    return parser


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _print_counters(counters: dict) -> None:
    for key in counters:
        print(f"{key}: {counters[key]}")


def cmd_validate(args) -> int:
    with open(_need(args.input, "annotations"), "r", encoding="utf-8") as fh:
        report = ingest.validate_jsonl(fh)
    print(f"records: {report.total}")
    print(f"valid: {report.parsed}")
    print(f"invalid: {report.invalid}")
    for line_no, reason in report.errors[: max(args.max_errors, 0)]:
        print(f"line {line_no}: {reason}", file=sys.stderr)
    if report.invalid > len(report.errors[: max(args.max_errors, 0)]):
        remaining = report.invalid - len(report.errors[: max(args.max_errors, 0)])
        print(f"... and {remaining} more", file=sys.stderr)
    return 1 if report.invalid else 0


def cmd_roles(args) -> int:
    _print_counters(stage_roles(args.input, args.meta, args.output,
                                args.stopwords, args.meta_policy))
    return 0


def cmd_entities_fit(args) -> int:
    _print_counters(stage_entities_fit(
        args.roles, args.annotations, args.vectors, args.output,
        stopwords_path=args.stopwords, vocab_size=args.vocab_size,
        n_clusters=args.clusters, seed=args.seed, sif_a=args.sif_a,
        sample_frac=args.sample_frac, max_iter=args.max_iter, tol=args.tol,
        overrides_path=args.label_overrides,
    ))
    return 0


def cmd_entities_resolve(args) -> int:
    _print_counters(stage_resolve(args.roles, args.model, args.vectors, args.output))
    return 0


def cmd_narratives(args) -> int:
    _print_counters(stage_narratives(args.resolved, args.output, args.provenance,
                                     args.mode, args.min_freq, args.blacklist))
    return 0


def cmd_stats_logodds(args) -> int:
    _print_counters(stage_logodds(args.narratives, args.output, args.prior_scale))
    return 0


def cmd_stats_divisiveness(args) -> int:
    _print_counters(stage_divisiveness(
        args.narratives, args.logodds, args.output, args.prior_scale,
        args.min_narratives, args.min_per_side, not args.no_eligibility,
    ))
    return 0


def cmd_stats_sentiment(args) -> int:
    _print_counters(stage_sentiment(args.provenance, args.annotations,
                                    args.output, args.lexicon))
    return 0


def cmd_stats_pmi(args) -> int:
    _print_counters(stage_pmi(args.provenance, args.output, args.min_joint))
    return 0


def cmd_stats_embed(args) -> int:
    _print_counters(stage_embed(
        args.resolved, args.narratives, args.output, args.neighbors,
        mode=args.mode, dim=args.dim, epochs=args.epochs, negatives=args.negatives,
        lr0=args.lr0, seed=args.seed, top_k=args.top_k,
    ))
    return 0


def cmd_stats_classify(args) -> int:
    try:
        grid = tuple(float(x) for x in args.lambda_grid.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"--lambda-grid must be comma-separated numbers, got {args.lambda_grid!r}")
    _print_counters(stage_classify(
        args.provenance, args.meta, args.output, lambda_grid=grid, seed=args.seed,
        test_frac=args.test_frac, n_folds=args.folds, tol=args.tol,
        max_iter=args.max_iter,
    ))
    return 0


def cmd_graph_build(args) -> int:
    with open(_need(args.narratives, "narratives TSV"), "r", encoding="utf-8") as fh:
        counts = narratives.parse_tsv(fh.read())
    scores = None
    if args.logodds:
        with open(_need(args.logodds, "log-odds TSV"), "r", encoding="utf-8") as fh:
            scores = logoddsmod.parse_tsv(fh.read())
    g = graphmod.build_graph(counts, scores)
    _write_text(args.output, graphmod.to_json(g))
    if args.dot:
        _write_text(args.dot, graphmod.to_dot(g))
    if args.graphml:
        _write_text(args.graphml, graphmod.to_graphml(g))
    if args.centralities:
        _write_text(args.centralities, graphmod.centralities_to_tsv(graphmod.centralities(g)))
    print(f"vertices: {g.n_vertices()}")
    print(f"edges: {g.n_edges()}")
    return 0


def cmd_graph_prune(args) -> int:
    with open(_need(args.input, "graph JSON"), "r", encoding="utf-8") as fh:
        g = graphmod.from_json(fh.read())
    pruned = graphmod.prune(g, top_k=args.top_k if args.top_k > 0 else None,
                            largest_component=args.largest_component)
    _write_text(args.output, graphmod.to_json(pruned))
    print(f"vertices: {pruned.n_vertices()}")
    print(f"edges: {pruned.n_edges()}")
    return 0


def cmd_graph_export(args) -> int:
    with open(_need(args.input, "graph JSON"), "r", encoding="utf-8") as fh:
        g = graphmod.from_json(fh.read())
    _write_text(args.output, graphmod.export_graph(g, args.format))
    return 0


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.output_dir:
        cfg.output_dir = args.output_dir
    for spec in args.overrides:
        apply_override(cfg, spec)
    validate_config(cfg)
    report = run_pipeline(cfg, resume=args.resume)
    for name in STAGE_ORDER:
        entry = report["stages"][name]
        if not entry["enabled"]:
            status = "disabled"
        elif entry["ran"]:
            status = f"ran in {entry['duration_s']:.3f}s"
        else:
            status = "resumed"
        print(f"{name}: {status}")
    print(f"report: {Path(cfg.output_dir) / REPORT_NAME}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
