from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

DATA = Path(__file__).resolve().parent / "data"

VOCAB = (
    "the a we fixed added merged reviewed tests parser login page client meeting module bug "
    "repository documentation deployment refactoring configuration dashboard prototype report "
    "week team feature branch release query database interface performance integration "
    "it is was and of to for with on in this that our new old api ui".split()
)


def random_sentence(rng: random.Random, lo: int = 4, hi: int = 15) -> str:
    words = [rng.choice(VOCAB) for _ in range(rng.randint(lo, hi))]
    words[0] = words[0].capitalize()
    # a single-letter last word would trigger the abbreviation guard
    if len(words[-1]) == 1:
        words[-1] = "done"
    return " ".join(words) + rng.choice(".!?")


def random_text(rng: random.Random, max_sentences: int = 6) -> str:
    return " ".join(random_sentence(rng) for _ in range(rng.randint(1, max_sentences)))


def synthetic_corpus(n: int = 545, seed: int = 0, courses: int = 3, teams: int = 15, weeks: int = 13):
    from hlsum.corpus import SummaryRecord

    rng = random.Random(seed)
    records = []
    for i in range(n):
        team = i % teams
        records.append(
            SummaryRecord(
                id=f"r{i:04d}",
                course=f"C{team % courses + 1}",
                team=f"T{team + 1}",
                week=i % weeks + 1,
                text=random_text(rng),
            )
        )
    return records


def make_candidates(sentences, artefact_prefix="a"):
    from hlsum.search import CandidateSentence
    from hlsum.text_core import tokenize_words

    return [
        CandidateSentence(
            index=i,
            text=s,
            source_artefact_id=f"{artefact_prefix}{i}",
            source_kind="commit",
            timestamp=1000 + i,
            word_count=len(tokenize_words(s)),
        )
        for i, s in enumerate(sentences)
    ]


def random_instance(seed: int, n: int = 12, corpus_size: int = 30, budget: int = 40):
    """Candidate pool, profile and budget for a desk-scale search check."""
    from hlsum.corpus import build_profile

    rng = random.Random(seed)
    sentences = [random_sentence(rng, 4, 14) for _ in range(n)]
    profile = build_profile(synthetic_corpus(corpus_size, seed=seed + 1000))
    return make_candidates(sentences), profile, budget


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def fixture_profile():
    from hlsum.corpus import build_profile, load_corpus

    return build_profile(load_corpus(DATA / "fixture_corpus.csv"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
