"""Role-phrase cleaning and verb folding.

Turns raw predicate-argument frames into compact role frames: argument
spans become short lowercase lemma phrases (stopwords, numbers, and
punctuation removed; long phrases dropped), predicates become verb tokens
with negation folded in as a ``not-`` prefix and modality kept as metadata.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .ingest import SentenceRecord, Token

#: Cleaned role phrases longer than this many tokens are dropped outright.
MAX_PHRASE_TOKENS = 4

#: A token whose lowercased lemma matches this is a number and is removed.
NUMBER_RE = re.compile(r"^[0-9][0-9,.\-]*$")

NEGATION_PREFIX = "not-"


def load_stopwords(path: str) -> frozenset[str]:
    """Load a stopword list: one lowercase token per line, '#' comments."""
    out = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.add(line)
    return frozenset(out)


def default_stopwords() -> frozenset[str]:
    """The packaged stopword list (common words, procedural terms, member
    and state names, written-out numbers)."""
    text = resources.files("narramine.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


def is_number(token: str) -> bool:
    return NUMBER_RE.match(token) is not None


def is_punct(token: str) -> bool:
    """True for tokens with no alphanumeric character at all."""
    return not any(ch.isalnum() for ch in token)


@dataclass(frozen=True)
class CleanPhrase:
    """A cleaned role phrase: lowercase lemma tokens plus the original surface."""

    tokens: tuple[str, ...]
    source_surface: str = ""

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class VerbToken:
    """A folded predicate: lemma text (``not-`` prefixed when negated) plus
    an optional modal lemma kept as metadata."""

    text: str
    modal: Optional[str] = None


def clean_tokens(
    lemmas: Sequence[str], stopwords: frozenset[str], max_tokens: int = MAX_PHRASE_TOKENS
) -> tuple[Optional[tuple[str, ...]], Optional[str]]:
    """Clean a lemma sequence; returns ``(tokens, None)`` or ``(None, reason)``.

    Reasons: ``'empty'`` when every token is filtered out, ``'too_long'``
    when more than ``max_tokens`` tokens survive cleaning.
    """
    kept = []
    for lemma in lemmas:
        low = lemma.lower()
        if not low or low in stopwords or is_number(low) or is_punct(low):
            continue
        kept.append(low)
    if not kept:
        return None, "empty"
    if len(kept) > max_tokens:
        return None, "too_long"
    return tuple(kept), None


def clean_phrase(
    tokens: Sequence[Token],
    stopwords: frozenset[str],
    max_tokens: int = MAX_PHRASE_TOKENS,
) -> Optional[CleanPhrase]:
    """Clean one argument span into a :class:`CleanPhrase`, or ``None``.

    Lemmas are lowercased; stopwords, numbers (``3``, ``3,000``, ``1-2``),
    and punctuation-only tokens are removed.  Phrases that clean to nothing
    or to more than ``max_tokens`` tokens are dropped.
    """
    kept, _reason = clean_tokens([t.lemma for t in tokens], stopwords, max_tokens)
    if kept is None:
        return None
    return CleanPhrase(tokens=kept, source_surface=" ".join(t.surface for t in tokens))


def fold_negation(verb_lemma: str, negated: bool, modal: Optional[str] = None) -> VerbToken:
    """Fold a negation flag into the verb lemma as a ``not-`` prefix."""
    if not verb_lemma:
        raise ValueError("verb lemma must be nonempty")
    text = verb_lemma.lower()
    if negated:
        text = NEGATION_PREFIX + text
    return VerbToken(text=text, modal=modal.lower() if modal else None)


@dataclass(frozen=True)
class RoleFrame:
    """One reduced frame: who (agent) does what (verb) to whom (patient),
    plus an optional attribute role and the sentence's provenance."""

    verb: VerbToken
    agent: Optional[CleanPhrase] = None
    patient: Optional[CleanPhrase] = None
    attribute: Optional[CleanPhrase] = None
    doc_id: str = ""
    sent_id: int = 0
    speaker: Optional[str] = None
    party: Optional[str] = None
    year: Optional[int] = None


@dataclass
class RoleStats:
    """Drop accounting for frame extraction."""

    frames_in: int = 0
    frames_kept: int = 0
    frames_dropped_no_roles: int = 0
    roles_kept: int = 0
    roles_dropped_empty: int = 0
    roles_dropped_too_long: int = 0

    def merge(self, other: "RoleStats") -> None:
        self.frames_in += other.frames_in
        self.frames_kept += other.frames_kept
        self.frames_dropped_no_roles += other.frames_dropped_no_roles
        self.roles_kept += other.roles_kept
        self.roles_dropped_empty += other.roles_dropped_empty
        self.roles_dropped_too_long += other.roles_dropped_too_long


def extract_frames(
    record: SentenceRecord,
    stopwords: frozenset[str],
    max_tokens: int = MAX_PHRASE_TOKENS,
    stats: Optional[RoleStats] = None,
) -> list[RoleFrame]:
    """Reduce a sentence record's raw frames to role frames.

    Each argument span is cleaned independently; a frame survives if at
    least one of agent/patient/attribute survives cleaning.  Provenance
    (doc, sentence, speaker metadata) is stamped onto every frame.
    """
    if stats is None:
        stats = RoleStats()
    out = []
    for raw in record.frames:
        stats.frames_in += 1
        roles: dict[str, Optional[CleanPhrase]] = {}
        for name, span in (("agent", raw.arg0), ("patient", raw.arg1), ("attribute", raw.arg2)):
            if span is None:
                roles[name] = None
                continue
            start, stop = span
            span_tokens = record.tokens[start:stop]
            kept, reason = clean_tokens([t.lemma for t in span_tokens], stopwords, max_tokens)
            if kept is None:
                roles[name] = None
                if reason == "too_long":
                    stats.roles_dropped_too_long += 1
                else:
                    stats.roles_dropped_empty += 1
            else:
                roles[name] = CleanPhrase(
                    tokens=kept,
                    source_surface=" ".join(t.surface for t in span_tokens),
                )
                stats.roles_kept += 1
        if roles["agent"] is None and roles["patient"] is None and roles["attribute"] is None:
            stats.frames_dropped_no_roles += 1
            continue
        stats.frames_kept += 1
        out.append(
            RoleFrame(
                verb=fold_negation(raw.verb_lemma, raw.negated, raw.modal),
                agent=roles["agent"],
                patient=roles["patient"],
                attribute=roles["attribute"],
                doc_id=record.doc_id,
                sent_id=record.sent_id,
                speaker=record.speaker,
                party=record.party,
                year=record.year,
            )
        )
    return out


# ---------------------------------------------------------------------------
# role-frame JSONL (intermediate pipeline artifact)
# ---------------------------------------------------------------------------


def roleframe_to_obj(frame: RoleFrame) -> dict:
    def phrase(p: Optional[CleanPhrase]):
        return list(p.tokens) if p is not None else None

    return {
        "doc_id": frame.doc_id,
        "sent_id": frame.sent_id,
        "speaker": frame.speaker,
        "party": frame.party,
        "year": frame.year,
        "verb": frame.verb.text,
        "modal": frame.verb.modal,
        "agent": phrase(frame.agent),
        "patient": phrase(frame.patient),
        "attribute": phrase(frame.attribute),
    }


def roleframe_from_obj(obj: dict) -> RoleFrame:
    def phrase(val) -> Optional[CleanPhrase]:
        return CleanPhrase(tokens=tuple(val)) if val is not None else None

    return RoleFrame(
        verb=VerbToken(text=obj["verb"], modal=obj.get("modal")),
        agent=phrase(obj.get("agent")),
        patient=phrase(obj.get("patient")),
        attribute=phrase(obj.get("attribute")),
        doc_id=obj["doc_id"],
        sent_id=obj["sent_id"],
        speaker=obj.get("speaker"),
        party=obj.get("party"),
        year=obj.get("year"),
    )
