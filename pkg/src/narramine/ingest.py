"""Wire schema, parsing, sentence splitting, and metadata joins.

The input corpus is JSONL, one sentence per line::

    {"doc_id": "d1", "sent_id": 0, "text": "...",
     "tokens": [{"t": "Taxes", "l": "tax"}, ...],
     "frames": [{"v": 1, "vl": "fund", "neg": false, "mod": null,
                 "arg0": [0, 1], "arg1": [2, 3], "arg2": null}],
     "ents": [{"s": "Medicare", "lbl": "ORG"}]}

Speaker metadata arrives separately as CSV with header
``doc_id,speaker,party,year`` and is joined onto records by ``doc_id``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

PARTIES = ("D", "R", "Other")

YEAR_MIN = 1700
YEAR_MAX = 2200


class RecordError(ValueError):
    """A JSONL line that does not satisfy the sentence-record schema."""

    def __init__(self, reason: str, line_no: Optional[int] = None):
        self.reason = reason
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + reason)


class MetadataError(ValueError):
    """A metadata CSV or join that violates its contract."""


@dataclass(frozen=True)
class Token:
    """One token: surface form and lemma."""

    surface: str
    lemma: str


@dataclass(frozen=True)
class RawFrame:
    """One predicate-argument frame over a sentence's token list.

    Spans are half-open ``(start, stop)`` token-index pairs; a missing role
    is ``None``.  ``verb_idx`` points at the predicate token, ``verb_lemma``
    is its lemma, ``negated`` marks a negation modifier on the predicate and
    ``modal`` carries a modal modifier's lemma if one is present.
    """

    verb_idx: int
    verb_lemma: str
    negated: bool = False
    modal: Optional[str] = None
    arg0: Optional[tuple[int, int]] = None
    arg1: Optional[tuple[int, int]] = None
    arg2: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class NEMention:
    """One named-entity mention: surface string and type label."""

    surface: str
    label: str


@dataclass(frozen=True)
class SpeakerMeta:
    """Document-level speaker metadata."""

    doc_id: str
    speaker: str
    party: str
    year: int


@dataclass(frozen=True)
class SentenceRecord:
    """One annotated sentence, optionally carrying joined speaker metadata."""

    doc_id: str
    sent_id: int
    text: str
    tokens: tuple[Token, ...] = ()
    frames: tuple[RawFrame, ...] = ()
    ents: tuple[NEMention, ...] = ()
    speaker: Optional[str] = None
    party: Optional[str] = None
    year: Optional[int] = None

    def with_meta(self, meta: SpeakerMeta) -> "SentenceRecord":
        return dataclasses.replace(
            self, speaker=meta.speaker, party=meta.party, year=meta.year
        )


# ---------------------------------------------------------------------------
# record parsing / serialization
# ---------------------------------------------------------------------------


def _require(cond: bool, reason: str) -> None:
    if not cond:
        raise RecordError(reason)


def _parse_span(value, name: str, n_tokens: int) -> Optional[tuple[int, int]]:
    if value is None:
        return None
    _require(
        isinstance(value, (list, tuple)) and len(value) == 2,
        f"{name} must be null or a [start, stop] pair",
    )
    start, stop = value
    _require(
        isinstance(start, int) and isinstance(stop, int)
        and not isinstance(start, bool) and not isinstance(stop, bool),
        f"{name} bounds must be integers",
    )
    _require(
        0 <= start < stop <= n_tokens,
        f"{name} span [{start}, {stop}) out of bounds for {n_tokens} tokens",
    )
    return (start, stop)


def parse_record(obj: object, line_no: Optional[int] = None) -> SentenceRecord:
    """Build a :class:`SentenceRecord` from a decoded JSON object.

    Raises :class:`RecordError` with a human-readable reason on any schema
    violation.
    """
    try:
        return _parse_record(obj)
    except RecordError as exc:
        if line_no is not None and exc.line_no is None:
            raise RecordError(exc.reason, line_no) from None
        raise


def _parse_record(obj: object) -> SentenceRecord:
    _require(isinstance(obj, dict), "record must be a JSON object")
    assert isinstance(obj, dict)
    for key in ("doc_id", "sent_id", "text", "tokens", "frames", "ents"):
        _require(key in obj, f"missing field {key!r}")

    doc_id = obj["doc_id"]
    _require(isinstance(doc_id, str) and doc_id != "", "doc_id must be a non-empty string")
    sent_id = obj["sent_id"]
    _require(
        isinstance(sent_id, int) and not isinstance(sent_id, bool) and sent_id >= 0,
        "sent_id must be a non-negative integer",
    )
    text = obj["text"]
    _require(isinstance(text, str), "text must be a string")

    raw_tokens = obj["tokens"]
    _require(isinstance(raw_tokens, list), "tokens must be a list")
    tokens = []
    for i, tok in enumerate(raw_tokens):
        _require(isinstance(tok, dict), f"tokens[{i}] must be an object")
        _require("t" in tok and "l" in tok, f"tokens[{i}] must have fields 't' and 'l'")
        _require(
            isinstance(tok["t"], str) and isinstance(tok["l"], str),
            f"tokens[{i}] fields 't' and 'l' must be strings",
        )
        tokens.append(Token(surface=tok["t"], lemma=tok["l"]))

    raw_frames = obj["frames"]
    _require(isinstance(raw_frames, list), "frames must be a list")
    frames = []
    for i, fr in enumerate(raw_frames):
        _require(isinstance(fr, dict), f"frames[{i}] must be an object")
        for key in ("v", "vl"):
            _require(key in fr, f"frames[{i}] missing field {key!r}")
        v = fr["v"]
        _require(
            isinstance(v, int) and not isinstance(v, bool) and 0 <= v < len(tokens),
            f"frames[{i}].v must be a token index",
        )
        vl = fr["vl"]
        _require(isinstance(vl, str) and vl != "", f"frames[{i}].vl must be a non-empty string")
        neg = fr.get("neg", False)
        _require(isinstance(neg, bool), f"frames[{i}].neg must be a boolean")
        mod = fr.get("mod")
        _require(
            mod is None or (isinstance(mod, str) and mod != ""),
            f"frames[{i}].mod must be null or a non-empty string",
        )
        frames.append(
            RawFrame(
                verb_idx=v,
                verb_lemma=vl,
                negated=neg,
                modal=mod,
                arg0=_parse_span(fr.get("arg0"), f"frames[{i}].arg0", len(tokens)),
                arg1=_parse_span(fr.get("arg1"), f"frames[{i}].arg1", len(tokens)),
                arg2=_parse_span(fr.get("arg2"), f"frames[{i}].arg2", len(tokens)),
            )
        )

    raw_ents = obj["ents"]
    _require(isinstance(raw_ents, list), "ents must be a list")
    ents = []
    for i, ent in enumerate(raw_ents):
        _require(isinstance(ent, dict), f"ents[{i}] must be an object")
        _require("s" in ent and "lbl" in ent, f"ents[{i}] must have fields 's' and 'lbl'")
        _require(
            isinstance(ent["s"], str) and ent["s"] != "",
            f"ents[{i}].s must be a non-empty string",
        )
        _require(isinstance(ent["lbl"], str), f"ents[{i}].lbl must be a string")
        ents.append(NEMention(surface=ent["s"], label=ent["lbl"]))

    return SentenceRecord(
        doc_id=doc_id,
        sent_id=sent_id,
        text=text,
        tokens=tuple(tokens),
        frames=tuple(frames),
        ents=tuple(ents),
    )


def record_to_obj(record: SentenceRecord) -> dict:
    """Serialize a record back to its wire-schema JSON object."""
    return {
        "doc_id": record.doc_id,
        "sent_id": record.sent_id,
        "text": record.text,
        "tokens": [{"t": t.surface, "l": t.lemma} for t in record.tokens],
        "frames": [
            {
                "v": f.verb_idx,
                "vl": f.verb_lemma,
                "neg": f.negated,
                "mod": f.modal,
                "arg0": list(f.arg0) if f.arg0 is not None else None,
                "arg1": list(f.arg1) if f.arg1 is not None else None,
                "arg2": list(f.arg2) if f.arg2 is not None else None,
            }
            for f in record.frames
        ],
        "ents": [{"s": e.surface, "lbl": e.label} for e in record.ents],
    }


def record_to_json(record: SentenceRecord) -> str:
    return json.dumps(record_to_obj(record), ensure_ascii=False, separators=(",", ":"))


@dataclass
class ParseReport:
    """Tally of a JSONL parse: how many lines survived, which failed and why."""

    total: int = 0
    parsed: int = 0
    invalid: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)


def parse_jsonl(
    lines: Iterable[str],
    on_error: str = "skip",
    report: Optional[ParseReport] = None,
) -> Iterator[SentenceRecord]:
    """Parse JSONL lines into records.

    ``on_error='skip'`` drops invalid lines (tallied in ``report``);
    ``on_error='abort'`` raises :class:`RecordError` naming the 1-based line.
    Blank lines are ignored and not counted.
    """
    if on_error not in ("skip", "abort"):
        raise ValueError(f"on_error must be 'skip' or 'abort', got {on_error!r}")
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if report is not None:
            report.total += 1
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordError(f"invalid JSON: {exc.msg}") from None
            record = parse_record(obj, line_no)
        except RecordError as exc:
            if on_error == "abort":
                raise RecordError(exc.reason, line_no) from None
            if report is not None:
                report.invalid += 1
                report.errors.append((line_no, exc.reason))
            continue
        if report is not None:
            report.parsed += 1
        yield record


def read_records(path: str, on_error: str = "skip", report: Optional[ParseReport] = None) -> list[SentenceRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return list(parse_jsonl(fh, on_error=on_error, report=report))


def write_records(path: str, records: Iterable[SentenceRecord]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_json(record))
            fh.write("\n")
            n += 1
    return n


def validate_jsonl(lines: Iterable[str]) -> ParseReport:
    """Validate JSONL lines against the sentence-record schema."""
    report = ParseReport()
    for _ in parse_jsonl(lines, on_error="skip", report=report):
        pass
    return report


# ---------------------------------------------------------------------------
# sentence splitting
# ---------------------------------------------------------------------------

_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s+[A-Z])")


def load_abbreviations(path: str) -> frozenset[str]:
    """Load a sentence-splitting abbreviation list (one per line, '#' comments)."""
    out = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.add(line)
    return frozenset(out)


def split_sentences(text: str, abbreviations: frozenset[str] = frozenset()) -> list[str]:
    """Split text into sentences on terminal punctuation.

    A split happens after a run of ``.!?`` followed by whitespace and an
    uppercase letter, unless the word ending at that run (punctuation
    included, e.g. ``Mr.`` or ``U.S.``) is a listed abbreviation.
    """
    boundaries = []
    for match in _BOUNDARY_RE.finditer(text):
        end = match.end()
        word_start = end
        while word_start > 0 and not text[word_start - 1].isspace():
            word_start -= 1
        if text[word_start:end] in abbreviations:
            continue
        boundaries.append(end)

    sentences = []
    start = 0
    for end in boundaries:
        chunk = text[start:end].strip()
        if chunk:
            sentences.append(chunk)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


# ---------------------------------------------------------------------------
# speaker metadata
# ---------------------------------------------------------------------------

_META_HEADER = ["doc_id", "speaker", "party", "year"]


def read_metadata_csv(path: str) -> list[SpeakerMeta]:
    """Read speaker metadata CSV with header ``doc_id,speaker,party,year``."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_metadata_csv(fh)


def parse_metadata_csv(fh: Iterable[str]) -> list[SpeakerMeta]:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise MetadataError("metadata CSV is empty") from None
    if header != _META_HEADER:
        raise MetadataError(
            f"metadata CSV header must be {','.join(_META_HEADER)!r}, got {','.join(header)!r}"
        )
    out = []
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise MetadataError(f"row {row_no}: expected 4 fields, got {len(row)}")
        doc_id, speaker, party, year_str = row
        if not doc_id:
            raise MetadataError(f"row {row_no}: doc_id must be non-empty")
        if party not in PARTIES:
            raise MetadataError(
                f"row {row_no}: party must be one of {'/'.join(PARTIES)}, got {party!r}"
            )
        try:
            year = int(year_str)
        except ValueError:
            raise MetadataError(f"row {row_no}: year must be an integer, got {year_str!r}") from None
        if not (YEAR_MIN <= year <= YEAR_MAX):
            raise MetadataError(f"row {row_no}: year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        out.append(SpeakerMeta(doc_id=doc_id, speaker=speaker, party=party, year=year))
    return out


def write_metadata_csv(path: str, rows: Iterable[SpeakerMeta]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_META_HEADER)
        for row in rows:
            writer.writerow([row.doc_id, row.speaker, row.party, row.year])


def index_metadata(meta: Sequence[SpeakerMeta]) -> dict[str, SpeakerMeta]:
    """Index metadata rows by doc_id, rejecting duplicates."""
    index: dict[str, SpeakerMeta] = {}
    for row in meta:
        if row.doc_id in index:
            raise MetadataError(f"duplicate doc_id in metadata: {row.doc_id!r}")
        index[row.doc_id] = row
    return index


def join_metadata(
    records: Iterable[SentenceRecord],
    meta: Sequence[SpeakerMeta],
    policy: str = "strict",
) -> tuple[list[SentenceRecord], int]:
    """Attach speaker metadata to records by doc_id.

    ``policy='strict'`` raises on a record whose doc_id has no metadata;
    ``policy='drop_unmatched'`` drops such records and returns how many.
    """
    if policy not in ("strict", "drop_unmatched"):
        raise ValueError(f"policy must be 'strict' or 'drop_unmatched', got {policy!r}")
    index = index_metadata(meta)
    joined: list[SentenceRecord] = []
    dropped = 0
    for record in records:
        row = index.get(record.doc_id)
        if row is None:
            if policy == "strict":
                raise MetadataError(f"no metadata for doc_id {record.doc_id!r}")
            dropped += 1
            continue
        joined.append(record.with_meta(row))
    return joined, dropped


def records_from_csv_text(text: str) -> list[SpeakerMeta]:
    """Parse metadata CSV from an in-memory string (convenience for tests)."""
    return parse_metadata_csv(io.StringIO(text))
