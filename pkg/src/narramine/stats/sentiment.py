"""Lexicon-based sentence sentiment with negation flipping.

Each sentence gets a compound score: sum the valences of lexicon tokens
(sign-flipped when a negator appears in the three preceding tokens), then
squash with ``x / sqrt(x^2 + alpha)`` into (-1, 1).  A narrative's
sentiment is the mean compound over the sentences it occurs in.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

DEFAULT_ALPHA = 15.0

NEGATION_WINDOW = 3

DEFAULT_NEGATORS = frozenset(
    {
        "not", "no", "never", "none", "neither", "nor", "nothing", "nobody",
        "cannot", "can't", "won't", "don't", "doesn't", "didn't", "isn't",
        "aren't", "wasn't", "weren't", "couldn't", "shouldn't", "wouldn't",
        "hasn't", "haven't", "hadn't", "ain't", "without", "hardly",
        "barely", "scarcely", "n't",
    }
)

_TOKEN_RE = re.compile(r"[a-z0-9'\-]+")


@dataclass(frozen=True)
class SentimentLexicon:
    """Token valences plus the negator set and squash constant."""

    valences: Mapping[str, float]
    negators: frozenset[str] = DEFAULT_NEGATORS
    normalization_alpha: float = DEFAULT_ALPHA


def load_lexicon(
    path: str,
    negators: frozenset[str] = DEFAULT_NEGATORS,
    normalization_alpha: float = DEFAULT_ALPHA,
) -> SentimentLexicon:
    """Load a ``token<TAB>valence`` lexicon file ('#' comments allowed)."""
    valences: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'token<TAB>valence'")
            try:
                valences[parts[0]] = float(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: valence must be a number") from None
    return SentimentLexicon(
        valences=valences, negators=negators, normalization_alpha=normalization_alpha
    )


def default_lexicon(
    negators: frozenset[str] = DEFAULT_NEGATORS, normalization_alpha: float = DEFAULT_ALPHA
) -> SentimentLexicon:
    """The packaged default valence lexicon."""
    text = resources.files("narramine.data").joinpath("sentiment_lexicon.tsv").read_text("utf-8")
    valences: dict[str, float] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        token, _, valence = line.partition("\t")
        valences[token] = float(valence)
    return SentimentLexicon(
        valences=valences, negators=negators, normalization_alpha=normalization_alpha
    )


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens (letters, digits, apostrophes, hyphens)."""
    return _TOKEN_RE.findall(text.lower())


def normalize(x: float, alpha: float = DEFAULT_ALPHA) -> float:
    """Squash a raw valence sum into (-1, 1)."""
    return x / math.sqrt(x * x + alpha)


def sentiment_compound(tokens: Sequence[str], lexicon: SentimentLexicon) -> float:
    """Compound sentiment of one token sequence.

    Lexicon hits contribute their valence, negated (sign-flipped) when any
    of the three preceding tokens is a negator.  No hits -> 0.0.
    """
    total = 0.0
    lowered = [t.lower() for t in tokens]
    for i, token in enumerate(lowered):
        valence = lexicon.valences.get(token)
        if valence is None:
            continue
        window = lowered[max(0, i - NEGATION_WINDOW):i]
        if any(w in lexicon.negators for w in window):
            valence = -valence
        total += valence
    if total == 0.0:
        return 0.0
    return normalize(total, lexicon.normalization_alpha)


def narrative_sentiment(
    narrative_sentences: Mapping[str, Iterable[tuple[str, int]]],
    sentence_tokens: Mapping[tuple[str, int], Sequence[str]],
    lexicon: SentimentLexicon,
) -> dict[str, float]:
    """Mean sentence compound per narrative key.

    ``narrative_sentences`` maps a key to the (doc_id, sent_id) pairs it
    occurred in; ``sentence_tokens`` supplies each sentence's tokens.  A key
    with no sentences, or a sentence with no tokens available, is an error:
    sentiment without provenance would be meaningless.
    """
    out: dict[str, float] = {}
    for key in sorted(narrative_sentences):
        sentences = list(narrative_sentences[key])
        if not sentences:
            raise ValueError(f"narrative {key!r} has no sentence provenance")
        scores = []
        for sent in sentences:
            tokens = sentence_tokens.get(tuple(sent))
            if tokens is None:
                raise ValueError(f"narrative {key!r}: missing tokens for sentence {sent!r}")
            scores.append(sentiment_compound(tokens, lexicon))
        out[key] = sum(scores) / len(scores)
    return out


SENTIMENT_TSV_HEADER = "key\tcompound\tn_sentences"


def to_tsv(scores: Mapping[str, float], n_sentences: Mapping[str, int]) -> str:
    """Render narrative sentiment as TSV, compound descending then key."""
    lines = [SENTIMENT_TSV_HEADER]
    for key in sorted(scores, key=lambda k: (-scores[k], k)):
        lines.append(f"{key}\t{scores[key]:.10g}\t{n_sentences.get(key, 0)}")
    return "\n".join(lines) + "\n"
