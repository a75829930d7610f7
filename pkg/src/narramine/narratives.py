"""Narrative statements: assembly, counting, filtering, and the TSV report.

A narrative statement is ``(agent entity, verb, patient entity)`` -- who
does what to whom.  Statements come from role frames whose phrases have
been resolved to entity labels; they are counted by key
``agent|verb|patient`` with per-party, per-year, and per-speaker tallies,
then filtered by a label blacklist and a minimum total count.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional

MODES = ("AVP", "AVP_or_AVA")

KEY_SEP = "|"


@dataclass(frozen=True)
class ResolvedFrame:
    """A role frame after entity resolution: labels instead of phrases."""

    verb: str
    agent: Optional[str] = None
    patient: Optional[str] = None
    attribute: Optional[str] = None
    modal: Optional[str] = None
    doc_id: str = ""
    sent_id: int = 0
    speaker: Optional[str] = None
    party: Optional[str] = None
    year: Optional[int] = None


@dataclass(frozen=True)
class NarrativeStatement:
    """One narrative statement occurrence with its provenance."""

    agent: str
    verb: str
    patient: str
    modal: Optional[str] = None
    doc_id: str = ""
    sent_id: int = 0
    speaker: Optional[str] = None
    party: Optional[str] = None
    year: Optional[int] = None

    @property
    def key(self) -> str:
        return KEY_SEP.join((self.agent, self.verb, self.patient))


def split_key(key: str) -> tuple[str, str, str]:
    parts = key.split(KEY_SEP)
    if len(parts) != 3:
        raise ValueError(f"narrative key must have 3 '|'-separated parts: {key!r}")
    return parts[0], parts[1], parts[2]


def resolved_to_obj(frame: ResolvedFrame) -> dict:
    return {
        "doc_id": frame.doc_id,
        "sent_id": frame.sent_id,
        "speaker": frame.speaker,
        "party": frame.party,
        "year": frame.year,
        "verb": frame.verb,
        "modal": frame.modal,
        "agent": frame.agent,
        "patient": frame.patient,
        "attribute": frame.attribute,
    }


def resolved_from_obj(obj: dict) -> ResolvedFrame:
    return ResolvedFrame(
        verb=obj["verb"],
        agent=obj.get("agent"),
        patient=obj.get("patient"),
        attribute=obj.get("attribute"),
        modal=obj.get("modal"),
        doc_id=obj["doc_id"],
        sent_id=obj["sent_id"],
        speaker=obj.get("speaker"),
        party=obj.get("party"),
        year=obj.get("year"),
    )


@dataclass
class AssemblyStats:
    frames_in: int = 0
    statements_out: int = 0
    dropped_no_agent: int = 0
    dropped_no_object: int = 0


def assemble_statements(
    frames: Iterable[ResolvedFrame],
    mode: str = "AVP",
    stats: Optional[AssemblyStats] = None,
) -> list[NarrativeStatement]:
    """Turn resolved frames into statements.

    ``mode='AVP'`` requires a resolved agent and patient.  In
    ``mode='AVP_or_AVA'`` a frame with no patient falls back to its
    attribute as the object.  Frames missing the needed roles are dropped.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if stats is None:
        stats = AssemblyStats()
    out = []
    for frame in frames:
        stats.frames_in += 1
        if frame.agent is None:
            stats.dropped_no_agent += 1
            continue
        obj = frame.patient
        if obj is None and mode == "AVP_or_AVA":
            obj = frame.attribute
        if obj is None:
            stats.dropped_no_object += 1
            continue
        stats.statements_out += 1
        out.append(
            NarrativeStatement(
                agent=frame.agent,
                verb=frame.verb,
                patient=obj,
                modal=frame.modal,
                doc_id=frame.doc_id,
                sent_id=frame.sent_id,
                speaker=frame.speaker,
                party=frame.party,
                year=frame.year,
            )
        )
    return out


# ---------------------------------------------------------------------------
# counting and filtering
# ---------------------------------------------------------------------------


def parse_blacklist(text: str) -> frozenset[str]:
    """Parse an entity-label blacklist: labels separated by commas and/or
    newlines, '#' lines are comments."""
    out = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        for label in line.split(","):
            label = label.strip()
            if label:
                out.add(label)
    return frozenset(out)


def load_blacklist(path: str) -> frozenset[str]:
    """Load an entity-label blacklist file (comma- or newline-separated)."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_blacklist(fh.read())


def default_blacklist() -> frozenset[str]:
    """The packaged label blacklist (procedural or uninterpretable labels)."""
    text = resources.files("narramine.data").joinpath("blacklist.txt").read_text("utf-8")
    return parse_blacklist(text)


@dataclass
class NarrativeRow:
    """Aggregated counts for one narrative key."""

    agent: str
    verb: str
    patient: str
    total: int = 0
    by_party: Counter = field(default_factory=Counter)
    by_year: Counter = field(default_factory=Counter)
    by_speaker: Counter = field(default_factory=Counter)
    sentences: list[tuple[str, int]] = field(default_factory=list)

    @property
    def key(self) -> str:
        return KEY_SEP.join((self.agent, self.verb, self.patient))


@dataclass
class NarrativeCounts:
    """Filtered narrative counts plus filter accounting."""

    rows: dict[str, NarrativeRow] = field(default_factory=dict)
    statements_in: int = 0
    statements_blacklisted: int = 0
    statements_counted: int = 0
    keys_below_min: int = 0
    min_freq: int = 1

    def sorted_rows(self) -> list[NarrativeRow]:
        return sorted(self.rows.values(), key=lambda r: (-r.total, r.key))


def count_and_filter(
    statements: Iterable[NarrativeStatement],
    min_freq: int = 1,
    blacklist: frozenset[str] = frozenset(),
) -> NarrativeCounts:
    """Count statements by key, dropping blacklisted labels first and
    sub-threshold keys afterwards.

    A statement is blacklisted when its agent or patient label is in the
    blacklist (exact label equality).  Keys with fewer than ``min_freq``
    occurrences are removed after counting.
    """
    counts = NarrativeCounts(min_freq=min_freq)
    seen_sentences: dict[str, set[tuple[str, int]]] = {}
    for st in statements:
        counts.statements_in += 1
        if st.agent in blacklist or st.patient in blacklist:
            counts.statements_blacklisted += 1
            continue
        counts.statements_counted += 1
        row = counts.rows.get(st.key)
        if row is None:
            row = NarrativeRow(agent=st.agent, verb=st.verb, patient=st.patient)
            counts.rows[st.key] = row
            seen_sentences[st.key] = set()
        row.total += 1
        if st.party is not None:
            row.by_party[st.party] += 1
        if st.year is not None:
            row.by_year[int(st.year)] += 1
        if st.speaker is not None:
            row.by_speaker[st.speaker] += 1
        sent = (st.doc_id, st.sent_id)
        if sent not in seen_sentences[st.key]:
            seen_sentences[st.key].add(sent)
            row.sentences.append(sent)

    below = [key for key, row in counts.rows.items() if row.total < min_freq]
    for key in below:
        del counts.rows[key]
    counts.keys_below_min = len(below)
    return counts


# ---------------------------------------------------------------------------
# reports and round-trip persistence
# ---------------------------------------------------------------------------

TSV_HEADER = "agent\tverb\tpatient\ttotal\tcount_D\tcount_R\tyears"


def to_tsv(counts: NarrativeCounts) -> str:
    """Render counts as TSV, rows ordered by total descending then key.

    The ``years`` column holds comma-joined ``year:count`` pairs in year
    order.  Party columns report D and R only; other parties count toward
    ``total`` but have no column of their own.
    """
    lines = [TSV_HEADER]
    for row in counts.sorted_rows():
        years = ",".join(f"{y}:{row.by_year[y]}" for y in sorted(row.by_year))
        lines.append(
            "\t".join(
                (
                    row.agent,
                    row.verb,
                    row.patient,
                    str(row.total),
                    str(row.by_party.get("D", 0)),
                    str(row.by_party.get("R", 0)),
                    years,
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_tsv(text: str) -> NarrativeCounts:
    """Parse the TSV report back into counts (D/R party and year tallies
    only; speakers and sentences are not part of the report)."""
    lines = text.splitlines()
    if not lines or lines[0] != TSV_HEADER:
        raise ValueError("narrative TSV header mismatch")
    counts = NarrativeCounts()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 7:
            raise ValueError(f"line {line_no}: expected 7 TSV fields, got {len(parts)}")
        agent, verb, patient, total, d, r, years = parts
        row = NarrativeRow(agent=agent, verb=verb, patient=patient, total=int(total))
        if int(d):
            row.by_party["D"] = int(d)
        if int(r):
            row.by_party["R"] = int(r)
        if years:
            for pair in years.split(","):
                year, _, n = pair.partition(":")
                row.by_year[int(year)] = int(n)
        counts.rows[row.key] = row
        counts.statements_counted += int(total)
    return counts


def write_provenance(path: str, counts: NarrativeCounts) -> None:
    """Write one JSON line per narrative key listing its sentences."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in counts.sorted_rows():
            obj = {
                "key": row.key,
                "sentences": [[doc, sid] for doc, sid in row.sentences],
                "speakers": {s: row.by_speaker[s] for s in sorted(row.by_speaker)},
            }
            fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def read_provenance(path: str) -> dict[str, dict]:
    out: dict[str, dict] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            out[obj["key"]] = {
                "sentences": [(doc, int(sid)) for doc, sid in obj["sentences"]],
                "speakers": {k: int(v) for k, v in obj.get("speakers", {}).items()},
            }
    return out
