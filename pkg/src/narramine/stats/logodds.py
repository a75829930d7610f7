"""Partisanship log-odds with an informative Dirichlet prior, plus the
entity divisiveness score built on top of it.

For two groups A and B with counts ``y_A`` and ``y_B`` over shared keys,
each key gets a prior proportional to its combined frequency; the score is
the difference in smoothed log-odds, with a variance estimate giving a
z-score.  Positive values lean toward group A (the analysis convention
puts Republicans in A, so positive means R-leaning).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional


@dataclass(frozen=True)
class LogOddsResult:
    """Smoothed log-odds difference for one key."""

    key: str
    delta: float
    variance: float
    z: float
    count_a: int = 0
    count_b: int = 0


def log_odds(
    counts_a: Mapping[str, int],
    counts_b: Mapping[str, int],
    prior_scale: float = 1.0,
) -> list[LogOddsResult]:
    """Log-odds-ratio scores with an informative Dirichlet prior.

    Keys are the union of both groups' keys with a positive combined
    count.  Each key's prior is ``prior_scale * |keys| * combined_share``,
    so the prior total is ``prior_scale * |keys|``.  Results are ordered
    by key.  Swapping the groups negates every delta and z exactly.
    """
    if prior_scale <= 0:
        raise ValueError(f"prior_scale must be positive, got {prior_scale}")
    keys = sorted(
        k
        for k in set(counts_a) | set(counts_b)
        if counts_a.get(k, 0) + counts_b.get(k, 0) > 0
    )
    for name, counts in (("counts_a", counts_a), ("counts_b", counts_b)):
        for k, v in counts.items():
            if v < 0:
                raise ValueError(f"{name}[{k!r}] is negative")

    n_a = sum(counts_a.values())
    n_b = sum(counts_b.values())
    if n_a == 0 or n_b == 0:
        raise ValueError("each group needs a positive total count")
    if len(keys) < 2:
        # with one key the smoothed odds degenerate (the key carries a
        # group's entire mass and its own prior)
        raise ValueError("log-odds needs at least two distinct keys")
    combined_total = n_a + n_b
    alpha_total = prior_scale * len(keys)

    out = []
    for k in keys:
        y_a = counts_a.get(k, 0)
        y_b = counts_b.get(k, 0)
        alpha_k = alpha_total * (y_a + y_b) / combined_total
        delta = math.log((y_a + alpha_k) / (n_a + alpha_total - y_a - alpha_k)) - math.log(
            (y_b + alpha_k) / (n_b + alpha_total - y_b - alpha_k)
        )
        variance = 1.0 / (y_a + alpha_k) + 1.0 / (y_b + alpha_k)
        z = delta / math.sqrt(variance)
        out.append(
            LogOddsResult(key=k, delta=delta, variance=variance, z=z, count_a=y_a, count_b=y_b)
        )
    return out


LOGODDS_TSV_HEADER = "key\tdelta\tz\tcount_a\tcount_b"


def to_tsv(results: Iterable[LogOddsResult]) -> str:
    """Render results as TSV ordered by delta descending, then key."""
    lines = [LOGODDS_TSV_HEADER]
    for r in sorted(results, key=lambda r: (-r.delta, r.key)):
        lines.append(f"{r.key}\t{r.delta:.10g}\t{r.z:.10g}\t{r.count_a}\t{r.count_b}")
    return "\n".join(lines) + "\n"


def parse_tsv(text: str) -> dict[str, LogOddsResult]:
    lines = text.splitlines()
    if not lines or lines[0] != LOGODDS_TSV_HEADER:
        raise ValueError("log-odds TSV header mismatch")
    out: dict[str, LogOddsResult] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"line {line_no}: expected 5 TSV fields, got {len(parts)}")
        key, delta, z, count_a, count_b = parts
        d = float(delta)
        zz = float(z)
        var = (d / zz) ** 2 if zz != 0 else float("nan")
        out[key] = LogOddsResult(
            key=key, delta=d, variance=var, z=zz, count_a=int(count_a), count_b=int(count_b)
        )
    return out


# ---------------------------------------------------------------------------
# divisiveness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Eligibility:
    """Minimum evidence for an entity to get a divisiveness score: at least
    ``min_narratives`` distinct narratives, and at least ``min_per_side``
    slanted toward each group (delta < 0 vs delta > 0)."""

    min_narratives: int = 6
    min_per_side: int = 3


@dataclass(frozen=True)
class DivisivenessScore:
    """How much more partisan an entity's narratives are than the entity."""

    entity: str
    score: float
    mean_abs_narrative_delta: float
    entity_abs_delta: float
    n_narratives: int
    n_dem: int
    n_rep: int


def entity_divisiveness(
    narrative_results: Iterable[LogOddsResult],
    entity_results: Mapping[str, LogOddsResult],
    membership: Mapping[str, Iterable[str]],
    eligibility: Optional[Eligibility] = Eligibility(),
) -> list[DivisivenessScore]:
    """Score each entity: mean |delta| of its narratives minus its own |delta|.

    ``membership`` maps an entity to the narrative keys it appears in; keys
    without a narrative result are ignored.  With ``eligibility`` set,
    entities with too few narratives or too one-sided a split (delta > 0 is
    R-slanted, delta < 0 D-slanted) are dropped.  Entities with no scored
    narratives are excluded with a warning.  Results are ordered by score
    descending, then entity.
    """
    narrative_deltas = {r.key: r.delta for r in narrative_results}
    out = []
    for entity in sorted(membership):
        if entity not in entity_results:
            continue
        deltas = [
            narrative_deltas[k]
            for k in sorted(set(membership[entity]))
            if k in narrative_deltas
        ]
        if not deltas:
            warnings.warn(f"entity {entity!r} has no scored narratives; excluded")
            continue
        n_rep = sum(1 for d in deltas if d > 0)
        n_dem = sum(1 for d in deltas if d < 0)
        if eligibility is not None:
            if len(deltas) < eligibility.min_narratives:
                continue
            if min(n_dem, n_rep) < eligibility.min_per_side:
                continue
        mean_abs = sum(abs(d) for d in deltas) / len(deltas)
        entity_abs = abs(entity_results[entity].delta)
        out.append(
            DivisivenessScore(
                entity=entity,
                score=mean_abs - entity_abs,
                mean_abs_narrative_delta=mean_abs,
                entity_abs_delta=entity_abs,
                n_narratives=len(deltas),
                n_dem=n_dem,
                n_rep=n_rep,
            )
        )
    out.sort(key=lambda s: (-s.score, s.entity))
    return out


DIVISIVENESS_TSV_HEADER = (
    "entity\tscore\tmean_abs_narrative_delta\tentity_abs_delta"
    "\tn_narratives\tn_dem\tn_rep"
)


def divisiveness_to_tsv(scores: Iterable[DivisivenessScore]) -> str:
    lines = [DIVISIVENESS_TSV_HEADER]
    for s in scores:
        lines.append(
            f"{s.entity}\t{s.score:.10g}\t{s.mean_abs_narrative_delta:.10g}"
            f"\t{s.entity_abs_delta:.10g}\t{s.n_narratives}\t{s.n_dem}\t{s.n_rep}"
        )
    return "\n".join(lines) + "\n"
