"""Pointwise mutual information between narratives at the document level.

Two narratives are associated when they occur in the same document:
``pmi(i, j) = ln( P(i and j) / (P(i) P(j)) )`` with probabilities
estimated as document fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping


@dataclass
class CooccurrenceTable:
    """Document-level occurrence and pair co-occurrence counts."""

    n_docs: int = 0
    doc_count: dict[str, int] = field(default_factory=dict)
    joint_count: dict[tuple[str, str], int] = field(default_factory=dict)


def build_cooccurrence(doc_keys: Mapping[str, Iterable[str]]) -> CooccurrenceTable:
    """Count in how many documents each key, and each unordered key pair,
    occurs.  ``doc_keys`` maps a document id to the narrative keys in it."""
    table = CooccurrenceTable()
    for doc_id in sorted(doc_keys):
        keys = sorted(set(doc_keys[doc_id]))
        table.n_docs += 1
        for k in keys:
            table.doc_count[k] = table.doc_count.get(k, 0) + 1
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                pair = (keys[i], keys[j])
                table.joint_count[pair] = table.joint_count.get(pair, 0) + 1
    return table


@dataclass(frozen=True)
class PMIResult:
    key_i: str
    key_j: str
    pmi: float
    joint: int
    count_i: int
    count_j: int


def pmi_pairs(table: CooccurrenceTable, min_joint: int = 1) -> list[PMIResult]:
    """PMI for every pair with at least ``min_joint`` joint documents,
    ordered by PMI descending then pair."""
    if table.n_docs <= 0:
        return []
    if min_joint < 1:
        raise ValueError(f"min_joint must be >= 1, got {min_joint}")
    out = []
    n = table.n_docs
    for (ki, kj), joint in table.joint_count.items():
        if joint < min_joint:
            continue
        ci = table.doc_count[ki]
        cj = table.doc_count[kj]
        value = math.log((joint / n) / ((ci / n) * (cj / n)))
        out.append(PMIResult(key_i=ki, key_j=kj, pmi=value, joint=joint, count_i=ci, count_j=cj))
    out.sort(key=lambda r: (-r.pmi, r.key_i, r.key_j))
    return out


PMI_TSV_HEADER = "key_i\tkey_j\tpmi\tjoint\tcount_i\tcount_j"


def to_tsv(results: Iterable[PMIResult]) -> str:
    lines = [PMI_TSV_HEADER]
    for r in results:
        lines.append(f"{r.key_i}\t{r.key_j}\t{r.pmi:.10g}\t{r.joint}\t{r.count_i}\t{r.count_j}")
    return "\n".join(lines) + "\n"
