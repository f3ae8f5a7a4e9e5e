import math
import random
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import DATA, make_candidates, random_instance, random_sentence
from hlsum import HlsumError
from hlsum.corpus import load_corpus, profile_from_vectors
from hlsum.features import extract_features
from hlsum.ingest import Artefact, TimeWindow, load_ndjson
from hlsum.search import (
    EmptyPoolError,
    Objective,
    SearchConfig,
    cosine_distance,
    evaluate,
    exhaustive_summarize,
    extract_candidates,
    feasible_subsets,
    greedy_summarize,
    local_search_summarize,
    render_summary,
    summarize,
)

SIX = [
    "We fixed the login bug on the client page.",
    "The parser now handles nested documentation blocks correctly.",
    "Our team reviewed the deployment configuration for the release.",
    "Integration tests were added for the database query module.",
    "I met the client and agreed on the dashboard prototype.",
    "Performance of the interface improved after the refactoring work.",
]


def _art(id, ts, title="", body="", kind="commit"):
    return Artefact(id, kind, ts, "dev", title, body)


def _oracle_objective(sentences, profile_texts):
    mean, std = oracles.corpus_stats(profile_texts)

    def of_subset(subset):
        text = " ".join(sentences[i] for i in subset)
        return oracles.scaled_cosine([v for _, v in oracles.features(text)], mean, std)

    return of_subset


# ------------------------------------------------------------ candidates


def test_two_sentence_body_gives_two_candidates_in_order():
    cands = extract_candidates([_art("a", 5, body="The first sentence is here. And a second one follows.")])
    assert [c.text for c in cands] == ["The first sentence is here.", "And a second one follows."]
    assert [c.index for c in cands] == [0, 1]
    assert all(c.source_artefact_id == "a" for c in cands)
    assert [c.word_count for c in cands] == [5, 5]


def test_duplicates_keep_the_earliest():
    arts = [
        _art("late", 20, body="Bumped the version number today."),
        _art("early", 10, body="bumped the VERSION number today."),
    ]
    (cand,) = extract_candidates(arts)
    assert cand.source_artefact_id == "early"


def test_short_sentences_dropped_and_whitespace_collapsed():
    cands = extract_candidates([_art("a", 1, title="Fix typo", body="Rewrote   the\n  whole  module. Ok then.")])
    assert [c.text for c in cands] == ["Rewrote the whole module."]


def test_window_and_empty_pool():
    arts = load_ndjson(DATA / "fixture_artefacts.ndjson")
    assert len(extract_candidates(arts)) == 18
    early = extract_candidates(arts, TimeWindow(0, 1554048000))
    assert len(early) == 11
    assert [c.text for c in early] == [c.text for c in extract_candidates(arts)[:11]]
    with pytest.raises(EmptyPoolError, match="empty candidate pool"):
        extract_candidates(arts, TimeWindow(0, 10))


def test_order_follows_timestamp_then_id():
    arts = [_art("b", 5, body="Second artefact has words."), _art("a", 5, body="First artefact has words."), _art("c", 1, body="Oldest artefact has words.")]
    assert [c.source_artefact_id for c in extract_candidates(arts)] == ["c", "a", "b"]


# ------------------------------------------------------------ objective


def test_cosine_examples():
    u = np.zeros(27)
    u[0] = 1
    t = np.zeros(27)
    t[:2] = 1
    assert cosine_distance(u, t) == pytest.approx(1 - 1 / math.sqrt(2), abs=1e-12)
    assert cosine_distance(u, t) == pytest.approx(0.292893, abs=1e-6)
    v = np.zeros(27)
    v[5] = 3
    assert cosine_distance(u, v) == pytest.approx(1.0, abs=1e-15)
    assert cosine_distance(u, -u) == 2.0
    assert cosine_distance(t, 4 * t) == pytest.approx(0.0, abs=1e-15)
    assert cosine_distance(np.zeros(3), np.zeros(3)) == 0.0
    assert cosine_distance(np.zeros(3), np.ones(3)) == 1.0


def test_summary_equal_to_target_scores_zero(fixture_profile):
    cands = make_candidates(SIX)
    target = extract_features(" ".join(SIX[:2])).as_array()
    objective, groups = evaluate([0, 1], cands, fixture_profile, target)
    assert objective == pytest.approx(0.0, abs=1e-12)
    assert groups == (0.0, 0.0, 0.0)


def test_empty_selection_is_worst(fixture_profile):
    objective, groups = evaluate([], make_candidates(SIX), fixture_profile)
    assert objective == 2.0
    assert groups == (math.inf,) * 3


def test_evaluate_matches_oracle(fixture_profile):
    texts = [r.text for r in load_corpus(DATA / "fixture_corpus.csv")]
    mean, std = oracles.corpus_stats(texts)
    cands = make_candidates(SIX)
    for subset in ([0], [1, 3], [0, 2, 5], list(range(6))):
        vec = [v for _, v in oracles.features(" ".join(SIX[i] for i in subset))]
        objective, groups = evaluate(subset, cands, fixture_profile)
        assert objective == pytest.approx(oracles.scaled_cosine(vec, mean, std), abs=1e-12)
        assert groups == pytest.approx(oracles.block_dists(vec, mean, std), abs=1e-9)


def test_summary_text_is_chronological(fixture_profile):
    cands = make_candidates(SIX)
    cands[0] = replace(cands[0], timestamp=2000)
    cands[4] = replace(cands[4], timestamp=500)
    obj = Objective(cands, fixture_profile)
    assert obj.summary_text([0, 4, 2]) == " ".join([SIX[4], SIX[2], SIX[0]])
    sel = greedy_summarize(obj, SearchConfig(budget_words=200))
    lines = render_summary(sel, cands).splitlines()
    assert all(line.endswith("]") for line in lines)
    assert render_summary(sel, cands, cite=False).splitlines() == [cands[i].text for i in sorted(sel.chosen, key=lambda i: cands[i].timestamp)]


def test_scale_consistency(fixture_profile):
    rng = random.Random(11)
    cands = make_candidates([random_sentence(rng, 4, 10) for _ in range(10)])
    obj = Objective(cands, fixture_profile)
    subsets = [s for s in feasible_subsets([c.word_count for c in cands], 10**6)]
    values = np.array([obj(s) for s in subsets])
    rank_a = np.argsort(np.argsort(values, kind="stable"), kind="stable")
    rank_b = np.argsort(np.argsort(values**2, kind="stable"), kind="stable")
    assert np.corrcoef(rank_a, rank_b)[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert subsets[int(np.argmin(values))] == subsets[int(np.argmin(values**2))]


# ------------------------------------------------------------ greedy


def test_greedy_trace_matches_scripted_oracle(fixture_profile):
    texts = [r.text for r in load_corpus(DATA / "fixture_corpus.csv")]
    cands = make_candidates(SIX)
    counts = [c.word_count for c in cands]
    steps = []
    sel = greedy_summarize(Objective(cands, fixture_profile), SearchConfig(budget_words=30), trace=lambda k, s: steps.append(s))
    expected = oracles.greedy_trace(SIX, counts, 30, _oracle_objective(SIX, texts))
    assert len(steps) == len(expected) >= 1
    chosen = set()
    for step, (index, value) in zip(steps, expected):
        chosen.add(index)
        assert set(step.chosen) == chosen
        assert step.objective == pytest.approx(value, abs=1e-12)
    assert sel.chosen == steps[-1].chosen
    assert sel.word_count <= 30


def test_greedy_single_candidate(fixture_profile):
    cands = make_candidates(SIX[:1])
    sel = greedy_summarize(Objective(cands, fixture_profile), SearchConfig(budget_words=50))
    assert sel.chosen == (0,)


def test_budget_below_every_sentence(fixture_profile):
    cands = make_candidates(SIX)
    for algo in ("greedy", "local", "exhaustive"):
        (sel,) = summarize(cands, fixture_profile, SearchConfig(budget_words=4, algorithm=algo))
        assert sel.chosen == ()
        assert sel.objective == 2.0
        assert sel.summary_text == ""


def test_empty_pool_errors(fixture_profile):
    for algo in ("greedy", "local", "exhaustive", "many"):
        with pytest.raises(EmptyPoolError, match="empty candidate pool"):
            summarize([], fixture_profile, SearchConfig(algorithm=algo))


# ------------------------------------------------------------ local and exhaustive


def test_local_is_deterministic(fixture_profile):
    cands, profile, budget = random_instance(4)
    config = SearchConfig(budget_words=budget, seed=9)
    a = summarize(cands, profile, config)
    b = summarize(cands, profile, config)
    assert a == b


def test_local_with_zero_iterations_returns_greedy(fixture_profile):
    cands, profile, budget = random_instance(5)
    obj = Objective(cands, profile)
    greedy = greedy_summarize(obj, SearchConfig(budget_words=budget))
    local = local_search_summarize(obj, SearchConfig(budget_words=budget, iterations=0))
    assert local == greedy


def test_local_reaches_optimum_on_ten_candidates():
    cands, profile, budget = random_instance(21, n=10)
    obj = Objective(cands, profile)
    config = SearchConfig(budget_words=budget, iterations=100_000)
    best = exhaustive_summarize(obj, config)
    local = local_search_summarize(obj, config)
    assert local.objective == pytest.approx(best.objective, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_exhaustive_matches_brute_force(seed):
    rng = random.Random(seed)
    sentences = [random_sentence(rng, 4, 14) for _ in range(9)]
    texts = [random_sentence(rng) + " " + random_sentence(rng) for _ in range(15)]
    vecs = np.array([extract_features(t).as_array() for t in texts])
    profile = profile_from_vectors(vecs)
    cands = make_candidates(sentences)
    counts = [c.word_count for c in cands]
    sel = exhaustive_summarize(Objective(cands, profile), SearchConfig(budget_words=35))
    mean, std = oracles.corpus_stats(texts)
    combo, value = oracles.brute_force_optimum(
        sentences, counts, 35, lambda text: oracles.scaled_cosine([v for _, v in oracles.features(text)], mean, std)
    )
    assert sel.chosen == combo
    assert sel.objective == pytest.approx(value, abs=1e-12)


def test_exhaustive_single_candidate(fixture_profile):
    obj = Objective(make_candidates(SIX[:1]), fixture_profile)
    sel = exhaustive_summarize(obj, SearchConfig(budget_words=50))
    assert sel.objective == min(obj(()), obj((0,)))


def test_exhaustive_refuses_large_pools(fixture_profile):
    cands = make_candidates([f"Sentence number {i} has words." for i in range(21)])
    with pytest.raises(HlsumError, match="pool too large for exhaustive mode"):
        exhaustive_summarize(Objective(cands, fixture_profile), SearchConfig())


def test_feasible_subsets_match_bitmask_oracle():
    counts = [5, 3, 8, 2, 7, 4]
    for budget in (0, 6, 12, 29):
        got = list(feasible_subsets(counts, budget))
        assert got == sorted(got)
        assert sorted(got) == sorted(oracles.all_feasible(counts, budget))


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(budget_words=3)
    with pytest.raises(ValueError):
        SearchConfig(population=7)
    with pytest.raises(ValueError):
        SearchConfig(algorithm="annealing")


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(10, 60))
def test_search_ordering_and_budget(seed, budget):
    cands, profile, _ = random_instance(seed, n=8, corpus_size=12)
    obj = Objective(cands, profile)
    config = SearchConfig(budget_words=budget, iterations=500, seed=seed)
    greedy = greedy_summarize(obj, config)
    local = local_search_summarize(obj, config, start=greedy)
    assert local.objective <= greedy.objective <= obj(())
    for sel in (greedy, local):
        assert sel.word_count <= budget
        assert sel.word_count == sum(cands[i].word_count for i in sel.chosen)
        assert 0.0 <= sel.objective <= 2.0
        assert sel.summary_text == obj.summary_text(sel.chosen)


def test_unpunctuated_candidates_stay_separate_sentences(fixture_profile):
    cands = make_candidates(["Add upload form validation", "Fix the session cookie flags"])
    obj = Objective(cands, fixture_profile, extract_features("Add upload form validation. Fix the session cookie flags.").as_array())
    assert obj((0, 1)) == pytest.approx(0.0, abs=1e-12)
    assert obj.summary_text((0, 1)) == "Add upload form validation Fix the session cookie flags"


def test_local_trace_strictly_improves():
    cands, profile, budget = random_instance(2)
    obj = Objective(cands, profile)
    steps = []
    sel = local_search_summarize(obj, SearchConfig(budget_words=budget, seed=3), trace=lambda k, s: steps.append((k, s.objective)))
    values = [v for _, v in steps]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert [k for k, _ in steps] == sorted(k for k, _ in steps)
    if steps:
        assert values[-1] == sel.objective
    assert obj.evaluations <= 5000 + 200
