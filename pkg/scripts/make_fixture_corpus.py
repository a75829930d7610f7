#!/usr/bin/env python3
"""Generate the committed test fixture corpus.

Writes a small, fully deterministic corpus shaped like the real inputs:

- ``annotations.jsonl``  -- ~200 role-annotated sentences across 40 documents
- ``metadata.csv``       -- speaker/party/year rows for every document
- ``vectors.txt``        -- 8-dimensional token vectors with planted cluster
                            structure so entity clustering is stable
- ``config.toml``        -- a pipeline config sized for the fixture

The corpus is engineered, not sampled from real text: Democratic and
Republican speakers draw from disjoint sentence pools (so log-odds,
divisiveness, and the party classifier all have signal), a handful of
sentences exercise specific edge cases (negation, modals, over-long roles,
number/punctuation stripping, agent-only frames, a token with no vector,
a blacklisted entity), and the "tax" entity participates in narratives on
both sides so the divisiveness stage has at least one eligible entity.

Run from the repository root:

    python3 scripts/make_fixture_corpus.py --output-dir tests/fixtures
"""

from __future__ import annotations

import argparse
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

SEED = 20260817
VECTOR_SEED = 7
VECTOR_DIM = 10

N_DEM_DOCS = 18
N_REP_DOCS = 18
N_IND_DOCS = 4
SENTENCES_PER_DOC = 5


# ---------------------------------------------------------------------------
# sentence templates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Template:
    name: str
    tokens: list  # list of (surface, lemma)
    frames: list  # wire-format frame dicts
    ents: list = field(default_factory=list)  # list of (surface, label)

    @property
    def text(self) -> str:
        return " ".join(surface for surface, _ in self.tokens)


def W(spec: str) -> list:
    """Parse "Surface/lemma Surface/lemma ..." into (surface, lemma) pairs."""
    pairs = []
    for item in spec.split():
        surface, _, lemma = item.partition("/")
        pairs.append((surface, lemma if lemma else surface.lower()))
    return pairs


def T(name, *chunks, neg=False, mod=None, ents=(), punct=".") -> Template:
    """Build a one-frame template from (role, "Surface/lemma ...") chunks.

    Roles: "arg0", "arg1", "arg2", "verb" (single token), or "-" for filler
    tokens that belong to no span.
    """
    tokens = []
    spans = {}
    verb_index = None
    verb_lemma = None
    for role, spec in chunks:
        start = len(tokens)
        tokens.extend(W(spec))
        stop = len(tokens)
        if role == "verb":
            if stop - start != 1:
                raise ValueError(f"{name}: verb chunk must be one token")
            verb_index = start
            verb_lemma = tokens[start][1]
        elif role in ("arg0", "arg1", "arg2"):
            spans[role] = [start, stop]
        elif role != "-":
            raise ValueError(f"{name}: unknown role {role!r}")
    if verb_index is None:
        raise ValueError(f"{name}: no verb chunk")
    if punct:
        tokens.append((punct, punct))
    frame = {
        "v": verb_index,
        "vl": verb_lemma,
        "neg": neg,
        "mod": mod,
        "arg0": spans.get("arg0"),
        "arg1": spans.get("arg1"),
        "arg2": spans.get("arg2"),
    }
    return Template(name, tokens, [frame], list(ents))


def two_frame_chain() -> Template:
    """"Taxes fund hospitals and hospitals save lives." -- two frames."""
    tokens = W(
        "Taxes/tax fund/fund hospitals/hospital and/and"
        " hospitals/hospital save/save lives/life"
    )
    tokens.append((".", "."))
    frames = [
        {"v": 1, "vl": "fund", "neg": False, "mod": None,
         "arg0": [0, 1], "arg1": [2, 3], "arg2": None},
        {"v": 5, "vl": "save", "neg": False, "mod": None,
         "arg0": [4, 5], "arg1": [6, 7], "arg2": None},
    ]
    return Template("chain_taxes_fund_save", tokens, frames)


DEM_POOL = [
    T("taxes_fund_hospitals",
      ("arg0", "Taxes/tax"), ("verb", "fund/fund"), ("arg1", "hospitals/hospital")),
    T("taxes_fund_schools",
      ("arg0", "Taxes/tax"), ("verb", "fund/fund"), ("arg1", "schools/school")),
    T("taxes_help_families",
      ("arg0", "Taxes/tax"), ("verb", "help/help"), ("arg1", "families/family")),
    T("government_protects_workers",
      ("arg0", "The/the government/government"), ("verb", "protects/protect"),
      ("arg1", "workers/worker")),
    T("medicare_helps_families",
      ("arg0", "Medicare/medicare"), ("verb", "helps/help"),
      ("arg1", "families/family"), ents=[("Medicare", "ORG")]),
    T("medicare_saves_lives",
      ("arg0", "Medicare/medicare"), ("verb", "saves/save"),
      ("arg1", "lives/life"), ents=[("Medicare", "ORG")]),
    T("workers_need_healthcare",
      ("arg0", "Workers/worker"), ("verb", "need/need"),
      ("arg1", "healthcare/healthcare")),
    T("millions_lost_benefits",
      ("arg0", "Millions/million of/of Americans/american"), ("verb", "lost/lose"),
      ("arg1", "their/their unemployment/unemployment benefits/benefit")),
    T("should_not_lose_benefits",
      ("-", "Today/today ,/,"), ("arg0", "Americans/american"),
      ("-", "should/should not/not"), ("verb", "lose/lose"),
      ("arg1", "their/their unemployment/unemployment benefits/benefit"),
      neg=True, mod="should"),
    T("wall_street_hurts_workers",
      ("arg0", "Wall/wall Street/street"), ("verb", "hurts/hurt"),
      ("arg1", "workers/worker"), ents=[("Wall Street", "ORG")]),
    two_frame_chain(),
]

REP_POOL = [
    T("taxes_destroy_jobs",
      ("arg0", "Taxes/tax"), ("verb", "destroy/destroy"), ("arg1", "jobs/job")),
    T("taxes_hurt_businesses",
      ("arg0", "Taxes/tax"), ("verb", "hurt/hurt"), ("arg1", "businesses/business")),
    T("government_threatens_businesses",
      ("arg0", "The/the government/government"), ("verb", "threatens/threaten"),
      ("arg1", "businesses/business")),
    T("government_cuts_taxes",
      ("arg0", "The/the government/government"), ("verb", "cut/cut"),
      ("arg1", "taxes/tax")),
    T("saddam_poses_threat",
      ("arg0", "Saddam/saddam Hussein/hussein"), ("verb", "poses/pose"),
      ("arg1", "a/a threat/threat"), ents=[("Saddam Hussein", "PERSON")]),
    T("saddam_threatens_america",
      ("arg0", "Saddam/saddam Hussein/hussein"), ("verb", "threatens/threaten"),
      ("arg1", "America/america"),
      ents=[("Saddam Hussein", "PERSON"), ("America", "GPE")]),
    T("america_protects_freedom",
      ("arg0", "America/america"), ("-", "must/must"), ("verb", "protect/protect"),
      ("arg1", "freedom/freedom"), mod="must", ents=[("America", "GPE")]),
    T("oil_companies_create_jobs",
      ("arg0", "Oil/oil companies/company"), ("verb", "create/create"),
      ("arg1", "jobs/job")),
    T("families_pay_taxes",
      ("arg0", "Families/family"), ("verb", "pay/pay"), ("arg1", "taxes/tax")),
    T("war_protects_country",
      ("arg0", "The/the war/war"), ("verb", "protects/protect"),
      ("arg1", "our/our country/country")),
]

SHARED_POOL = [
    T("god_bless_america",
      ("arg0", "God/god"), ("verb", "bless/bless"), ("arg1", "America/america"),
      ents=[("America", "GPE")]),
    T("god_bless_texas",  # "texas" is a stopword: patient cleans away
      ("arg0", "God/god"), ("verb", "bless/bless"), ("arg1", "Texas/texas"),
      ents=[("Texas", "GPE")]),
    T("americans_go",  # agent-only frame
      ("arg0", "Americans/american"), ("verb", "go/go")),
    T("bartlett_protects_workers",  # "bartlett" is a blacklisted entity label
      ("arg0", "Bartlett/bartlett"), ("verb", "protects/protect"),
      ("arg1", "workers/worker"), ents=[("Bartlett", "PERSON")]),
    T("people_lose_jobs",
      ("arg0", "People/people"), ("verb", "lose/lose"), ("arg1", "jobs/job")),
    T("children_need_schools",
      ("arg0", "Children/child"), ("verb", "need/need"), ("arg1", "schools/school")),
    T("long_role_dropped",  # six-token agent exceeds the four-token cap
      ("arg0", "Proud/proud hardworking/hardworking honest/honest brave/brave"
               " patriotic/patriotic citizens/citizen"),
      ("verb", "support/support"), ("arg1", "America/america"),
      ents=[("America", "GPE")]),
    T("numbers_and_punct_stripped",
      ("arg0", "People/people"), ("verb", "paid/pay"),
      ("arg1", "taxes/tax in/in 1994/1994")),
    T("no_vector_agent",  # "zeitgeist" has no vector and is not a named entity
      ("arg0", "The/the zeitgeist/zeitgeist"), ("verb", "threatens/threaten"),
      ("arg1", "America/america"), ents=[("America", "GPE")]),
    T("teachers_help_children",
      ("arg0", "Teachers/teacher"), ("verb", "help/help"),
      ("arg1", "children/child")),
    T("pronoun_frame_dropped",  # every role cleans away: whole frame dropped
      ("arg0", "They/they"), ("verb", "voted/vote")),
]

# placed exactly twice so one narrative key falls below min_freq = 3
RARE_TEMPLATE = T("rare_wages_support_families",
                  ("arg0", "Wages/wage"), ("verb", "support/support"),
                  ("arg1", "families/family"))


# ---------------------------------------------------------------------------
# token vectors with planted cluster structure
# ---------------------------------------------------------------------------

VECTOR_GROUPS = {
    0: ["tax", "wage", "spending"],
    1: ["job", "business", "economy"],
    2: ["hospital", "doctor", "healthcare", "life"],
    3: ["family", "child", "worker", "people", "american"],
    4: ["school", "teacher", "student"],
    5: ["oil", "company", "energy"],
    6: ["war", "weapon", "enemy", "threat"],
    7: ["unemployment", "benefit"],
    8: ["god", "freedom", "country", "nation"],
    9: ["government"],
}
# deliberately absent from vectors.txt: "zeitgeist", "million"


def write_vectors(path: Path) -> None:
    rng = random.Random(VECTOR_SEED)
    lines = []
    for axis, words in sorted(VECTOR_GROUPS.items()):
        for word in words:
            vec = [rng.gauss(0.0, 0.05) for _ in range(VECTOR_DIM)]
            vec[axis] += 2.0
            lines.append(word + " " + " ".join(f"{x:.6f}" for x in vec))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# document assembly
# ---------------------------------------------------------------------------


def assign_speakers() -> list:
    """Return (doc_id, speaker, party, year) rows for every document.

    The first twelve documents of each major party share six speakers (two
    documents each) so per-speaker aggregation spans documents; the rest get
    one document per speaker.
    """
    rows = []
    doc_index = 0

    def add(party: str, prefix: str, n_docs: int, doubled: int) -> None:
        nonlocal doc_index
        speaker_no = 0
        remaining = n_docs
        while remaining > 0:
            speaker_no += 1
            speaker = f"speaker_{prefix}{speaker_no:02d}"
            docs_for_speaker = 2 if doubled > 0 and remaining >= 2 else 1
            doubled -= 1
            for _ in range(docs_for_speaker):
                doc_id = f"speech_{doc_index:03d}"
                year = 1995 + doc_index % 6
                rows.append((doc_id, speaker, party, year))
                doc_index += 1
                remaining -= 1

    add("D", "d", N_DEM_DOCS, doubled=6)
    add("R", "r", N_REP_DOCS, doubled=6)
    add("Other", "i", N_IND_DOCS, doubled=2)
    return rows


def compose_documents(rows: list) -> dict:
    """Pick SENTENCES_PER_DOC templates for every document, deterministically."""
    rng = random.Random(SEED)
    shared_cycle = list(SHARED_POOL)
    compositions = {}
    ind_cursor = 0
    for doc_id, _speaker, party, _year in rows:
        if party == "D":
            picks = rng.choices(DEM_POOL, k=3) + rng.choices(SHARED_POOL, k=2)
        elif party == "R":
            picks = rng.choices(REP_POOL, k=3) + rng.choices(SHARED_POOL, k=2)
        else:  # "Other"
            # independents cycle through the shared pool so every edge-case
            # sentence is guaranteed to appear in the corpus
            picks = []
            for _ in range(SENTENCES_PER_DOC):
                picks.append(shared_cycle[ind_cursor % len(shared_cycle)])
                ind_cursor += 1
        rng.shuffle(picks)
        compositions[doc_id] = picks
    # one below-threshold narrative: the rare template appears exactly twice
    compositions["speech_000"][4] = RARE_TEMPLATE
    compositions["speech_018"][4] = RARE_TEMPLATE
    return compositions


def write_corpus(out_dir: Path) -> None:
    rows = assign_speakers()
    compositions = compose_documents(rows)

    usage = Counter()
    n_sentences = 0
    with open(out_dir / "annotations.jsonl", "w", encoding="utf-8") as fh:
        for doc_id, _speaker, _party, _year in rows:
            for sent_id, template in enumerate(compositions[doc_id]):
                usage[template.name] += 1
                n_sentences += 1
                record = {
                    "doc_id": doc_id,
                    "sent_id": sent_id,
                    "text": template.text,
                    "tokens": [{"t": s, "l": l} for s, l in template.tokens],
                    "frames": template.frames,
                    "ents": [{"s": s, "lbl": lbl} for s, lbl in template.ents],
                }
                fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")

    with open(out_dir / "metadata.csv", "w", encoding="utf-8") as fh:
        fh.write("doc_id,speaker,party,year\n")
        for doc_id, speaker, party, year in rows:
            fh.write(f"{doc_id},{speaker},{party},{year}\n")

    write_vectors(out_dir / "vectors.txt")

    expected = len(rows) * SENTENCES_PER_DOC
    if n_sentences != expected:
        raise AssertionError(f"wrote {n_sentences} sentences, expected {expected}")
    if usage["rare_wages_support_families"] != 2:
        raise AssertionError("the rare template must appear exactly twice")
    # templates that never produce a countable narrative may appear any
    # number of times; the rest must clear min_freq so counts are stable
    exempt = {"rare_wages_support_families", "pronoun_frame_dropped"}
    thin = {name: n for name, n in usage.items() if n < 3 and name not in exempt}
    if thin:
        raise AssertionError(
            f"templates used fewer than 3 times (counts will be unstable): {thin}"
        )
    print(f"wrote {n_sentences} sentences in {len(rows)} documents to {out_dir}")
    for name, count in usage.most_common():
        print(f"  {count:3d}  {name}")


CONFIG_TOML = """\
# pipeline configuration for the committed test fixture corpus
[paths]
annotations = "annotations.jsonl"
metadata = "metadata.csv"
vectors = "vectors.txt"
output_dir = "out"

[params]
seed = 42
mode = "AVP"
ne_vocab_size = 8
n_clusters = 10
min_freq = 3
# near-uniform SIF weights: the fixture corpus is tiny, so token
# probabilities are huge relative to real-corpus scale
sif_a = 1.0
sample_frac = 1.0
kmeans_max_iter = 50
kmeans_tol = 0.0
prior_scale = 1.0
min_joint = 2
min_narratives = 6
min_per_side = 3
neighbors_top_k = 5

[sgns]
dim = 8
epochs = 3
negatives = 2
lr0 = 0.025

[classify]
lambda_grid = [0.001, 0.1, 10.0]
test_frac = 0.25
n_folds = 5
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output-dir", default="tests/fixtures",
                        help="directory to write fixture files into")
    args = parser.parse_args()
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_corpus(out_dir)
    (out_dir / "config.toml").write_text(CONFIG_TOML, encoding="utf-8")
    print(f"wrote {out_dir / 'config.toml'}")


if __name__ == "__main__":
    main()
