"""Single-objective subset searches under a word budget."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from hlsum import HlsumError
from hlsum.rng import SplitMix64
from hlsum.search.candidates import CandidateSentence, EmptyPoolError
from hlsum.search.objective import Objective

ALGORITHMS = ("greedy", "local", "exhaustive", "many")
MAX_EXHAUSTIVE = 20
KICK_MOVES = 2


@dataclass(frozen=True)
class SearchConfig:
    budget_words: int = 120
    algorithm: str = "local"
    iterations: int = 5000
    generations: int = 200
    population: int = 60
    seed: int = 0
    min_sentence_words: int = 4

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.budget_words < self.min_sentence_words:
            raise ValueError("budget_words must be >= min_sentence_words")
        if self.population < 2 or self.population % 2:
            raise ValueError("population must be even and >= 2")
        if self.iterations < 0 or self.generations < 0:
            raise ValueError("iterations and generations must be >= 0")


@dataclass(frozen=True)
class Selection:
    chosen: tuple[int, ...]
    summary_text: str
    objective: float
    group_objectives: tuple[float, float, float]
    word_count: int
    in_region: Optional[bool] = None


# Called as trace(iteration, selection) on every accepted improvement.
Trace = Callable[[int, Selection], None]


def make_selection(objective: Objective, chosen, in_region: Optional[bool] = None) -> Selection:
    key = tuple(sorted(set(chosen)))
    ev = objective.evaluate(key)
    return Selection(
        chosen=key,
        summary_text=objective.summary_text(key),
        objective=ev.objective,
        group_objectives=ev.group_objectives,
        word_count=objective.words(key),
        in_region=in_region,
    )


def _check_pool(candidates: Sequence[CandidateSentence]) -> None:
    if not candidates:
        raise EmptyPoolError()


def greedy_summarize(objective: Objective, config: SearchConfig, trace: Trace | None = None) -> Selection:
    """Add the feasible candidate that lowers the objective most, until none does.

    Ties go to the lowest index.
    """
    _check_pool(objective.candidates)
    budget = config.budget_words
    chosen: set[int] = set()
    words = 0
    current = objective(chosen)
    step = 0
    while True:
        best, best_value = None, current
        for i, cand in enumerate(objective.candidates):
            if i in chosen or words + cand.word_count > budget:
                continue
            value = objective(chosen | {i})
            if value < best_value:
                best, best_value = i, value
        if best is None:
            break
        chosen.add(best)
        words += objective.candidates[best].word_count
        current = best_value
        step += 1
        if trace:
            trace(step, make_selection(objective, chosen))
    return make_selection(objective, chosen)


def _neighbours(chosen: frozenset[int], objective: Objective, budget: int) -> list[tuple]:
    counts = [c.word_count for c in objective.candidates]
    words = sum(counts[i] for i in chosen)
    inside = sorted(chosen)
    outside = [i for i in range(len(counts)) if i not in chosen]
    moves: list[tuple] = []
    for j in outside:
        if words + counts[j] <= budget:
            moves.append(("add", j))
    for i in inside:
        moves.append(("remove", i))
    for i in inside:
        for j in outside:
            if words - counts[i] + counts[j] <= budget:
                moves.append(("swap", i, j))
    return moves


def _apply(chosen: frozenset[int], move) -> frozenset[int]:
    if move[0] == "add":
        return chosen | {move[1]}
    if move[0] == "remove":
        return chosen - {move[1]}
    return (chosen - {move[1]}) | {move[2]}


def local_search_summarize(
    objective: Objective,
    config: SearchConfig,
    start: Selection | None = None,
    trace: Trace | None = None,
) -> Selection:
    """First-improvement hill climbing from the greedy result, with kicks.

    The add/remove/swap neighbourhood is reshuffled after every accepted move.
    A descent ends at a full pass without improvement; the best set found so
    far is then kicked by ``KICK_MOVES`` random moves and a new descent
    starts. Everything stops after ``config.iterations`` neighbour evaluations
    (kicks count as one each).
    """
    _check_pool(objective.candidates)
    if start is None:
        start = greedy_summarize(objective, config)
    rng = SplitMix64(config.seed)
    budget = config.budget_words
    best = current = frozenset(start.chosen)
    best_value = current_value = start.objective
    spent = 0
    while spent < config.iterations:
        while spent < config.iterations:
            moves = _neighbours(current, objective, budget)
            rng.shuffle(moves)
            improved = False
            for move in moves:
                if spent >= config.iterations:
                    break
                spent += 1
                candidate = _apply(current, move)
                value = objective(candidate)
                if value < current_value:
                    current, current_value = candidate, value
                    improved = True
                    if value < best_value:
                        best, best_value = current, value
                        if trace:
                            trace(spent, make_selection(objective, best))
                    break
            if not improved:
                break
        if spent >= config.iterations:
            break
        current = best
        for _ in range(KICK_MOVES):
            moves = _neighbours(current, objective, budget)
            if not moves:
                return make_selection(objective, best)
            current = _apply(current, moves[rng.randbelow(len(moves))])
        spent += 1
        current_value = objective(current)
        if current_value < best_value:
            best, best_value = current, current_value
            if trace:
                trace(spent, make_selection(objective, best))
    return make_selection(objective, best)


def exhaustive_summarize(objective: Objective, config: SearchConfig) -> Selection:
    """Best budget-feasible subset by full enumeration (n <= 20).

    Subsets are visited in lexicographic order of their sorted index tuples
    and only a strictly better value replaces the incumbent, so ties resolve
    to the lexicographically smallest set.
    """
    n = len(objective.candidates)
    _check_pool(objective.candidates)
    if n > MAX_EXHAUSTIVE:
        raise HlsumError("pool too large for exhaustive mode")
    counts = [c.word_count for c in objective.candidates]
    best, best_value = (), objective(())
    for subset in feasible_subsets(counts, config.budget_words):
        value = objective(subset)
        if value < best_value:
            best, best_value = subset, value
    return make_selection(objective, best)


def feasible_subsets(counts: Sequence[int], budget: int):
    """All budget-feasible index tuples, empty set first, in lexicographic order."""
    n = len(counts)

    def walk(prefix: list[int], words: int):
        yield tuple(prefix)
        start = prefix[-1] + 1 if prefix else 0
        for j in range(start, n):
            if words + counts[j] <= budget:
                prefix.append(j)
                yield from walk(prefix, words + counts[j])
                prefix.pop()

    yield from walk([], 0)
