"""Tests for role-phrase cleaning and verb folding."""

from __future__ import annotations

import random
import string

import pytest

from narramine.ingest import RawFrame, Token
from narramine.rolecore import (
    MAX_PHRASE_TOKENS,
    CleanPhrase,
    RoleStats,
    VerbToken,
    clean_phrase,
    clean_tokens,
    default_stopwords,
    extract_frames,
    fold_negation,
    is_number,
    is_punct,
    roleframe_from_obj,
    roleframe_to_obj,
)
from tests.conftest import make_record

STOPS = frozenset({"the", "of", "their", "a", "an", "in", "to", "and"})


class TestTokenPredicates:
    @pytest.mark.parametrize("tok", ["3", "3,000", "1-2", "1994", "9.5", "0"])
    def test_numbers(self, tok):
        assert is_number(tok)

    @pytest.mark.parametrize("tok", ["b2", "three", "-3", ",3", ""])
    def test_non_numbers(self, tok):
        assert not is_number(tok)

    @pytest.mark.parametrize("tok", [".", ",", "--", "...", "?!", ""])
    def test_punct(self, tok):
        assert is_punct(tok)

    @pytest.mark.parametrize("tok", ["a", "3", "it's", "U.S."])
    def test_non_punct(self, tok):
        assert not is_punct(tok)


class TestCleanTokens:
    def test_benefit_phrase(self):
        kept, reason = clean_tokens(["their", "unemployment", "benefit"], STOPS)
        assert kept == ("unemployment", "benefit")
        assert reason is None

    def test_millions_phrase(self):
        kept, _ = clean_tokens(["million", "of", "american"], STOPS)
        assert kept == ("million", "american")

    def test_lowercases(self):
        kept, _ = clean_tokens(["Unemployment", "BENEFIT"], STOPS)
        assert kept == ("unemployment", "benefit")

    def test_all_filtered_is_empty(self):
        assert clean_tokens(["the", "of", "3,000", "..."], STOPS) == (None, "empty")
        assert clean_tokens([], STOPS) == (None, "empty")

    def test_too_long_dropped(self):
        lemmas = ["economic", "growth", "package", "reform", "plan"]
        assert clean_tokens(lemmas, STOPS) == (None, "too_long")
        # exactly at the cap survives
        kept, reason = clean_tokens(lemmas[:MAX_PHRASE_TOKENS], STOPS)
        assert kept is not None and len(kept) == MAX_PHRASE_TOKENS
        assert reason is None

    def test_cap_applies_after_filtering(self):
        lemmas = ["the", "economic", "growth", "package", "reform", "of", "1994"]
        kept, reason = clean_tokens(lemmas, STOPS)
        assert kept == ("economic", "growth", "package", "reform")
        assert reason is None

    def test_property_suite(self):
        """No stopwords, numbers, or punctuation survive; caps respected."""
        rng = random.Random(99)
        stopwords = default_stopwords()
        vocab = ["tax", "hospital", "worker", "benefit", "economic", "growth", "oil"]
        noise = list(stopwords)[:50] + ["3,000", "1994", ".", ",", "--", "7"]
        for _ in range(1000):
            lemmas = [
                rng.choice(vocab if rng.random() < 0.5 else noise)
                for _ in range(rng.randint(0, 8))
            ]
            kept, reason = clean_tokens(lemmas, stopwords)
            if kept is None:
                assert reason in ("empty", "too_long")
                continue
            assert 1 <= len(kept) <= MAX_PHRASE_TOKENS
            for tok in kept:
                assert tok == tok.lower()
                assert tok not in stopwords
                assert not is_number(tok)
                assert not is_punct(tok)


class TestCleanPhrase:
    def test_keeps_surface(self):
        tokens = [
            Token("their", "their"),
            Token("unemployment", "unemployment"),
            Token("benefits", "benefit"),
        ]
        phrase = clean_phrase(tokens, STOPS)
        assert phrase == CleanPhrase(
            tokens=("unemployment", "benefit"),
            source_surface="their unemployment benefits",
        )
        assert phrase.text == "unemployment benefit"
        assert len(phrase) == 2

    def test_dropped_phrase_is_none(self):
        assert clean_phrase([Token("the", "the")], STOPS) is None


class TestFoldNegation:
    def test_plain(self):
        assert fold_negation("fund", False) == VerbToken(text="fund", modal=None)

    def test_negated_prefix(self):
        assert fold_negation("lose", True).text == "not-lose"

    def test_lowercases(self):
        assert fold_negation("Lose", True, "Should") == VerbToken(
            text="not-lose", modal="should"
        )

    def test_modal_is_metadata_not_text(self):
        folded = fold_negation("lose", True, "should")
        assert folded.text == "not-lose"
        assert folded.modal == "should"

    def test_empty_lemma_rejected(self):
        with pytest.raises(ValueError, match="verb lemma"):
            fold_negation("", False)


class TestExtractFrames:
    def _benefits_record(self):
        return make_record(
            "Millions/million of/of Americans/american lost/lose "
            "their/their unemployment/unemployment benefits/benefit ./.",
            frames=(
                RawFrame(verb_idx=3, verb_lemma="lose", arg0=(0, 3), arg1=(4, 7)),
            ),
        )

    def test_benefits_example(self):
        frames = extract_frames(self._benefits_record(), STOPS)
        assert len(frames) == 1
        frame = frames[0]
        assert frame.agent.tokens == ("million", "american")
        assert frame.verb.text == "lose"
        assert frame.patient.tokens == ("unemployment", "benefit")
        assert frame.attribute is None

    def test_passive_voice_same_roles(self):
        """Role labels, not word order, decide agent and patient."""
        passive = make_record(
            "Their/their unemployment/unemployment benefits/benefit were/be "
            "lost/lose by/by millions/million of/of Americans/american ./.",
            frames=(
                RawFrame(verb_idx=4, verb_lemma="lose", arg0=(6, 9), arg1=(0, 3)),
            ),
        )
        active = extract_frames(self._benefits_record(), STOPS)[0]
        roles = extract_frames(passive, STOPS)[0]
        assert roles.agent.tokens == active.agent.tokens
        assert roles.verb.text == active.verb.text
        assert roles.patient.tokens == active.patient.tokens

    def test_negation_and_modal(self):
        record = make_record(
            "Americans/american should/should not/not lose/lose benefits/benefit",
            frames=(
                RawFrame(
                    verb_idx=3, verb_lemma="lose", negated=True, modal="should",
                    arg0=(0, 1), arg1=(4, 5),
                ),
            ),
        )
        frame = extract_frames(record, STOPS)[0]
        assert frame.verb.text == "not-lose"
        assert frame.verb.modal == "should"

    def test_frame_dropped_when_no_role_survives(self):
        record = make_record(
            "They/they voted/vote ./.",
            frames=(RawFrame(verb_idx=1, verb_lemma="vote", arg0=(0, 1)),),
        )
        stats = RoleStats()
        frames = extract_frames(record, frozenset({"they"}), stats=stats)
        assert frames == []
        assert stats.frames_dropped_no_roles == 1
        assert stats.roles_dropped_empty == 1

    def test_frame_kept_with_single_surviving_role(self):
        record = make_record(
            "Americans/american go/go ./.",
            frames=(RawFrame(verb_idx=1, verb_lemma="go", arg0=(0, 1)),),
        )
        frame = extract_frames(record, STOPS)[0]
        assert frame.agent.tokens == ("american",)
        assert frame.patient is None

    def test_provenance_stamped(self):
        record = make_record(
            "Americans/american go/go",
            frames=(RawFrame(verb_idx=1, verb_lemma="go", arg0=(0, 1)),),
            doc_id="speech_7",
            sent_id=3,
            speaker="smith",
            party="D",
            year=1999,
        )
        frame = extract_frames(record, STOPS)[0]
        assert (frame.doc_id, frame.sent_id) == ("speech_7", 3)
        assert (frame.speaker, frame.party, frame.year) == ("smith", "D", 1999)

    def test_accounting_adds_up(self):
        rng = random.Random(7)
        vocab = ["tax", "the", "of", "hospital", "worker", "1994", ".", "benefit",
                 "economic", "growth", "package", "reform", "plan"]
        stats = RoleStats()
        total_frames = 0
        for i in range(300):
            n = rng.randint(2, 10)
            words = " ".join(
                f"{w.capitalize()}/{w}" for w in (rng.choice(vocab) for _ in range(n))
            )
            frames = []
            for _ in range(rng.randint(0, 3)):
                spans = []
                for _ in range(3):
                    if rng.random() < 0.4:
                        spans.append(None)
                    else:
                        start = rng.randrange(n)
                        spans.append((start, rng.randint(start + 1, n)))
                frames.append(
                    RawFrame(
                        verb_idx=rng.randrange(n),
                        verb_lemma="fund",
                        arg0=spans[0],
                        arg1=spans[1],
                        arg2=spans[2],
                    )
                )
            record = make_record(words, frames=tuple(frames), doc_id=f"d{i}")
            total_frames += len(frames)
            extract_frames(record, STOPS, stats=stats)
        assert stats.frames_in == total_frames
        assert stats.frames_kept + stats.frames_dropped_no_roles == stats.frames_in

    def test_merge(self):
        a = RoleStats(frames_in=2, frames_kept=1, frames_dropped_no_roles=1,
                      roles_kept=3, roles_dropped_empty=1, roles_dropped_too_long=2)
        b = RoleStats(frames_in=1, frames_kept=1, roles_kept=1)
        a.merge(b)
        assert a.frames_in == 3
        assert a.frames_kept == 2
        assert a.roles_kept == 4
        assert a.roles_dropped_too_long == 2


class TestRoleFrameJsonl:
    def test_round_trip(self):
        record = make_record(
            "Millions/million of/of Americans/american lost/lose "
            "their/their unemployment/unemployment benefits/benefit",
            frames=(
                RawFrame(verb_idx=3, verb_lemma="lose", negated=True, modal="should",
                         arg0=(0, 3), arg1=(4, 7)),
            ),
            speaker="smith",
            party="D",
            year=1995,
        )
        frame = extract_frames(record, STOPS)[0]
        restored = roleframe_from_obj(roleframe_to_obj(frame))
        assert restored.verb == frame.verb
        assert restored.agent.tokens == frame.agent.tokens
        assert restored.patient.tokens == frame.patient.tokens
        assert restored.attribute is None
        assert (restored.doc_id, restored.sent_id) == (frame.doc_id, frame.sent_id)
        assert (restored.speaker, restored.party, restored.year) == ("smith", "D", 1995)


class TestDefaultStopwords:
    def test_loaded_and_plausible(self):
        stops = default_stopwords()
        assert len(stops) > 1000
        for word in ("the", "of", "congress", "gentleman", "today"):
            assert word in stops
        for word in ("tax", "hospital", "unemployment", "god"):
            assert word not in stops

    def test_all_lowercase_single_tokens(self):
        for word in default_stopwords():
            assert word == word.lower()
            assert " " not in word
