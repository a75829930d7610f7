"""Tests for record parsing, sentence splitting, and metadata joins."""

from __future__ import annotations

import json
import random

import pytest

from narramine.ingest import (
    MetadataError,
    NEMention,
    ParseReport,
    RawFrame,
    RecordError,
    SentenceRecord,
    SpeakerMeta,
    Token,
    index_metadata,
    join_metadata,
    parse_jsonl,
    parse_record,
    record_to_json,
    record_to_obj,
    records_from_csv_text,
    split_sentences,
    validate_jsonl,
)

GOOD_LINE = json.dumps(
    {
        "doc_id": "d1",
        "sent_id": 0,
        "text": "Taxes fund hospitals.",
        "tokens": [
            {"t": "Taxes", "l": "tax"},
            {"t": "fund", "l": "fund"},
            {"t": "hospitals", "l": "hospital"},
            {"t": ".", "l": "."},
        ],
        "frames": [
            {
                "v": 1,
                "vl": "fund",
                "neg": False,
                "mod": None,
                "arg0": [0, 1],
                "arg1": [2, 3],
                "arg2": None,
            }
        ],
        "ents": [{"s": "Medicare", "lbl": "ORG"}],
    }
)


def random_record(rng: random.Random, doc_no: int) -> SentenceRecord:
    words = ["Taxes", "fund", "hospitals", "and", "schools", "today"]
    n = rng.randint(1, len(words))
    tokens = tuple(Token(surface=w, lemma=w.lower()) for w in words[:n])
    frames = []
    for _ in range(rng.randint(0, 2)):
        spans = []
        for _ in range(3):
            if rng.random() < 0.4:
                spans.append(None)
            else:
                start = rng.randrange(n)
                stop = rng.randint(start + 1, n)
                spans.append((start, stop))
        frames.append(
            RawFrame(
                verb_idx=rng.randrange(n),
                verb_lemma=rng.choice(["fund", "cut", "lose"]),
                negated=rng.random() < 0.3,
                modal=rng.choice([None, "should", "must"]),
                arg0=spans[0],
                arg1=spans[1],
                arg2=spans[2],
            )
        )
    ents = tuple(
        NEMention(surface=rng.choice(["Medicare", "Social Security"]), label="ORG")
        for _ in range(rng.randint(0, 2))
    )
    return SentenceRecord(
        doc_id=f"doc_{doc_no}",
        sent_id=rng.randrange(10),
        text=" ".join(t.surface for t in tokens),
        tokens=tokens,
        frames=tuple(frames),
        ents=ents,
    )


class TestParseRecord:
    def test_good_line_round_trips(self):
        record = parse_record(json.loads(GOOD_LINE))
        assert record.doc_id == "d1"
        assert record.frames[0].verb_lemma == "fund"
        assert record.frames[0].arg0 == (0, 1)
        assert record.ents[0].surface == "Medicare"
        assert json.loads(record_to_json(record)) == json.loads(GOOD_LINE)

    def test_serialization_round_trip_random(self):
        rng = random.Random(1234)
        for i in range(200):
            record = random_record(rng, i)
            assert parse_record(record_to_obj(record)) == record

    def test_defaults_for_optional_frame_fields(self):
        obj = json.loads(GOOD_LINE)
        del obj["frames"][0]["neg"]
        del obj["frames"][0]["mod"]
        del obj["frames"][0]["arg2"]
        record = parse_record(obj)
        assert record.frames[0].negated is False
        assert record.frames[0].modal is None
        assert record.frames[0].arg2 is None

    @pytest.mark.parametrize(
        "mutate, reason_part",
        [
            (lambda o: o.pop("doc_id"), "missing field 'doc_id'"),
            (lambda o: o.update(doc_id=""), "doc_id must be a non-empty string"),
            (lambda o: o.update(sent_id=-1), "sent_id must be a non-negative integer"),
            (lambda o: o.update(sent_id=True), "sent_id must be a non-negative integer"),
            (lambda o: o.update(text=7), "text must be a string"),
            (lambda o: o.update(tokens={}), "tokens must be a list"),
            (lambda o: o["tokens"].append({"t": "x"}), "tokens[4] must have fields 't' and 'l'"),
            (lambda o: o["frames"][0].update(v=99), "frames[0].v must be a token index"),
            (lambda o: o["frames"][0].update(v=True), "frames[0].v must be a token index"),
            (lambda o: o["frames"][0].update(vl=""), "frames[0].vl must be a non-empty string"),
            (lambda o: o["frames"][0].update(neg="yes"), "frames[0].neg must be a boolean"),
            (lambda o: o["frames"][0].update(mod=""), "frames[0].mod must be null"),
            (lambda o: o["frames"][0].update(arg0=[0]), "arg0 must be null or a [start, stop] pair"),
            (lambda o: o["frames"][0].update(arg0=[0.5, 1]), "arg0 bounds must be integers"),
            (lambda o: o["frames"][0].update(arg0=[2, 2]), "span [2, 2) out of bounds"),
            (lambda o: o["frames"][0].update(arg1=[3, 5]), "span [3, 5) out of bounds"),
            (lambda o: o["frames"][0].update(arg2=[-1, 2]), "span [-1, 2) out of bounds"),
            (lambda o: o["ents"][0].pop("lbl"), "ents[0] must have fields 's' and 'lbl'"),
            (lambda o: o["ents"][0].update(s=""), "ents[0].s must be a non-empty string"),
        ],
    )
    def test_schema_violations(self, mutate, reason_part):
        obj = json.loads(GOOD_LINE)
        mutate(obj)
        with pytest.raises(RecordError) as exc_info:
            parse_record(obj)
        assert reason_part in exc_info.value.reason

    def test_non_object_rejected(self):
        with pytest.raises(RecordError, match="record must be a JSON object"):
            parse_record([1, 2, 3])


class TestParseJsonl:
    def test_skip_tallies_invalid_lines(self):
        lines = [GOOD_LINE, "", "not json", GOOD_LINE, '{"doc_id": "d2"}']
        report = ParseReport()
        records = list(parse_jsonl(lines, on_error="skip", report=report))
        assert len(records) == 2
        assert (report.total, report.parsed, report.invalid) == (4, 2, 2)
        assert report.errors[0][0] == 3
        assert "invalid JSON" in report.errors[0][1]
        assert report.errors[1][0] == 5
        assert "missing field" in report.errors[1][1]

    def test_abort_names_line(self):
        lines = [GOOD_LINE, "not json"]
        with pytest.raises(RecordError, match="line 2"):
            list(parse_jsonl(lines, on_error="abort"))

    def test_blank_lines_uncounted(self):
        report = validate_jsonl(["", "   ", GOOD_LINE, "\t"])
        assert (report.total, report.parsed, report.invalid) == (1, 1, 0)

    def test_bad_on_error_value(self):
        with pytest.raises(ValueError, match="on_error"):
            list(parse_jsonl([GOOD_LINE], on_error="ignore"))


class TestSplitSentences:
    def test_two_sentences(self):
        text = "God bless America. God bless Texas."
        assert split_sentences(text) == ["God bless America.", "God bless Texas."]

    def test_empty_text(self):
        assert split_sentences("") == []
        assert split_sentences("   ") == []

    def test_abbreviation_suppresses_split(self):
        text = "Mr. Smith voted. He left."
        assert split_sentences(text, frozenset({"Mr."})) == ["Mr. Smith voted.", "He left."]
        assert split_sentences(text) == ["Mr.", "Smith voted.", "He left."]

    def test_multi_dot_abbreviation(self):
        text = "The U.S. Senate adjourned. Work resumed."
        assert split_sentences(text, frozenset({"U.S."})) == [
            "The U.S. Senate adjourned.",
            "Work resumed.",
        ]

    def test_no_split_before_lowercase(self):
        assert split_sentences("He said no. but then agreed.") == [
            "He said no. but then agreed."
        ]

    def test_exclamation_and_question(self):
        assert split_sentences("Really? Yes! Fine.") == ["Really?", "Yes!", "Fine."]

    def test_idempotent_on_split_output(self):
        text = "Taxes fund schools. Teachers help children. Really? Yes!"
        pieces = split_sentences(text)
        for piece in pieces:
            assert split_sentences(piece) == [piece]


class TestMetadata:
    CSV = "doc_id,speaker,party,year\nd1,smith,D,1995\nd2,jones,R,1996\nd3,who,Other,1997\n"

    def test_parse_good_csv(self):
        rows = records_from_csv_text(self.CSV)
        assert rows[0] == SpeakerMeta(doc_id="d1", speaker="smith", party="D", year=1995)
        assert [r.party for r in rows] == ["D", "R", "Other"]

    @pytest.mark.parametrize(
        "text, match",
        [
            ("", "empty"),
            ("doc_id,speaker,party\nd1,smith,D\n", "header"),
            ("doc_id,speaker,party,year\nd1,smith,D\n", "expected 4 fields"),
            ("doc_id,speaker,party,year\n,smith,D,1995\n", "doc_id must be non-empty"),
            ("doc_id,speaker,party,year\nd1,smith,I,1995\n", "party must be one of D/R/Other"),
            ("doc_id,speaker,party,year\nd1,smith,D,soon\n", "year must be an integer"),
            ("doc_id,speaker,party,year\nd1,smith,D,1600\n", "outside"),
            ("doc_id,speaker,party,year\nd1,smith,D,2300\n", "outside"),
        ],
    )
    def test_parse_failures(self, text, match):
        with pytest.raises(MetadataError, match=match):
            records_from_csv_text(text)

    def test_duplicate_doc_id_fatal(self):
        rows = records_from_csv_text(
            "doc_id,speaker,party,year\nd1,smith,D,1995\nd1,jones,R,1996\n"
        )
        with pytest.raises(MetadataError, match="duplicate doc_id"):
            index_metadata(rows)

    def test_join_strict(self):
        rows = records_from_csv_text(self.CSV)
        record = parse_record(json.loads(GOOD_LINE))
        joined, dropped = join_metadata([record], rows, policy="strict")
        assert dropped == 0
        assert joined[0].speaker == "smith"
        assert joined[0].party == "D"
        assert joined[0].year == 1995
        # the original record is untouched
        assert record.speaker is None

    def test_join_strict_missing_doc_fatal(self):
        rows = records_from_csv_text("doc_id,speaker,party,year\nd9,x,D,1995\n")
        record = parse_record(json.loads(GOOD_LINE))
        with pytest.raises(MetadataError, match="no metadata for doc_id 'd1'"):
            join_metadata([record], rows, policy="strict")

    def test_join_drop_unmatched(self):
        rows = records_from_csv_text("doc_id,speaker,party,year\nd9,x,D,1995\n")
        record = parse_record(json.loads(GOOD_LINE))
        joined, dropped = join_metadata([record], rows, policy="drop_unmatched")
        assert joined == []
        assert dropped == 1

    def test_join_bad_policy(self):
        with pytest.raises(ValueError, match="policy"):
            join_metadata([], [], policy="lenient")


class TestFixtureCorpus:
    def test_fixture_parses_clean(self, fixture_dir):
        lines = (fixture_dir / "annotations.jsonl").read_text().splitlines()
        report = validate_jsonl(lines)
        assert report.invalid == 0
        assert report.parsed == 200

    def test_fixture_metadata_joins(self, fixture_dir, fixture_records):
        rows = records_from_csv_text((fixture_dir / "metadata.csv").read_text())
        joined, dropped = join_metadata(fixture_records, rows, policy="strict")
        assert dropped == 0
        assert all(r.party in ("D", "R", "Other") for r in joined)
