"""Shared test fixtures and record-building helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

from narramine.ingest import NEMention, RawFrame, SentenceRecord, Token

FIXTURES = Path(__file__).parent / "fixtures"


def make_record(
    words: str,
    frames: tuple[RawFrame, ...] = (),
    ents: tuple[NEMention, ...] = (),
    doc_id: str = "d1",
    sent_id: int = 0,
    **meta,
) -> SentenceRecord:
    """Build a record from 'Surface/lemma Surface/lemma ...' shorthand."""
    tokens = []
    for chunk in words.split():
        surface, _, lemma = chunk.partition("/")
        tokens.append(Token(surface=surface, lemma=lemma or surface.lower()))
    return SentenceRecord(
        doc_id=doc_id,
        sent_id=sent_id,
        text=" ".join(t.surface for t in tokens),
        tokens=tuple(tokens),
        frames=frames,
        ents=ents,
        **meta,
    )


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_records():
    from narramine.ingest import read_records

    return read_records(str(FIXTURES / "annotations.jsonl"), on_error="abort")
