"""Three-objective search toward the region spanned by human summaries.

Objectives are the readability, lexical and entropy block distances to the
target. The target region is the box ``[0, r_g]`` per block, where ``r_g`` is
the largest distance of any corpus member to the target in that block.
The loop is NSGA-II style: binary tournaments on (in region, Pareto rank,
crowding distance), uniform crossover, bit-flip mutation, and a repair step
that drops the longest sentences until the budget holds. The returned front
is the non-dominated set of every subset evaluated during the run.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from hlsum import HlsumError
from hlsum.corpus import SummaryRecord, records_matrix, region_radii
from hlsum.features import CATEGORIES
from hlsum.rng import SplitMix64
from hlsum.search.candidates import EmptyPoolError
from hlsum.search.objective import Objective
from hlsum.search.single import SearchConfig, Selection, Trace, greedy_summarize, make_selection

CROSSOVER_P = 0.9


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def in_region(objectives: Sequence[float], radii: Sequence[float]) -> bool:
    return all(o <= r for o, r in zip(objectives, radii))


def dominance_matrix(points) -> np.ndarray:
    """``M[i, j]`` is True when point i dominates point j."""
    P = np.asarray(points, dtype=float)
    le = np.all(P[:, None, :] <= P[None, :, :], axis=2)
    lt = np.any(P[:, None, :] < P[None, :, :], axis=2)
    return le & lt


def non_dominated_sort(points: Sequence[Sequence[float]]) -> list[list[int]]:
    """Fronts of ``points`` as lists of indices, best front first."""
    if len(points) == 0:
        return []
    dom = dominance_matrix(points)
    remaining = dom.sum(axis=0)
    alive = np.ones(len(points), dtype=bool)
    fronts = []
    while alive.any():
        front = np.flatnonzero(alive & (remaining == 0))
        fronts.append(front.tolist())
        alive[front] = False
        remaining = remaining - dom[front].sum(axis=0)
    return fronts


def crowding_distance(points: Sequence[Sequence[float]], front: Sequence[int]) -> dict[int, float]:
    dist = {i: 0.0 for i in front}
    if len(front) <= 2:
        return {i: math.inf for i in front}
    for m in range(len(points[front[0]])):
        ordered = sorted(front, key=lambda i: (points[i][m], i))
        lo, hi = points[ordered[0]][m], points[ordered[-1]][m]
        dist[ordered[0]] = dist[ordered[-1]] = math.inf
        if hi == lo or not math.isfinite(hi - lo):
            continue
        for k in range(1, len(ordered) - 1):
            dist[ordered[k]] += (points[ordered[k + 1]][m] - points[ordered[k - 1]][m]) / (hi - lo)
    return dist


def pareto_filter(points: np.ndarray) -> list[int]:
    """Indices of rows not dominated by any other row."""
    points = np.asarray(points, dtype=float)
    keep = []
    for i, p in enumerate(points):
        le = np.all(points <= p, axis=1)
        lt = np.any(points < p, axis=1)
        if not np.any(le & lt):
            keep.append(i)
    return keep


def _repair(bits: list[bool], counts: Sequence[int], budget: int) -> list[bool]:
    words = sum(c for c, b in zip(counts, bits) if b)
    if words <= budget:
        return bits
    # longest first, ties to the highest index
    for i in sorted((i for i, b in enumerate(bits) if b), key=lambda i: (-counts[i], -i)):
        bits[i] = False
        words -= counts[i]
        if words <= budget:
            break
    return bits


def _key(bits: Sequence[bool]) -> tuple[int, ...]:
    return tuple(i for i, b in enumerate(bits) if b)


def many_objective_summarize(
    objective: Objective,
    config: SearchConfig,
    records: Sequence[SummaryRecord] | None = None,
    radii: dict[str, float] | None = None,
    trace: Trace | None = None,
) -> list[Selection]:
    """Non-dominated selections, in-region members first, then by scalar objective.

    The region comes from ``records`` when given, else ``radii``, else the
    radii stored in the profile.
    """
    n = len(objective.candidates)
    if n == 0:
        raise EmptyPoolError()
    if records is not None:
        if len(records) < 2:
            raise HlsumError("many-objective search needs a corpus of at least 2 records")
        radii = region_radii(records_matrix(records), objective.profile, objective.target)
    elif radii is None:
        if objective.profile.n < 2 or objective.profile.region is None:
            raise HlsumError("many-objective search needs a corpus of at least 2 records")
        radii = objective.profile.region
    box = [float(radii[c]) for c in CATEGORIES]

    rng = SplitMix64(config.seed)
    counts = [c.word_count for c in objective.candidates]
    budget = config.budget_words
    size = config.population
    p_init = min(0.5, budget / max(sum(counts), 1))
    p_mut = 1.0 / n

    archive: dict[tuple[int, ...], tuple[float, float, float]] = {}

    def objectives_of(bits) -> tuple[float, float, float]:
        key = _key(bits)
        groups = objective.evaluate(key).group_objectives
        archive[key] = groups
        return groups

    seed_sel = greedy_summarize(objective, config)
    population = [[i in seed_sel.chosen for i in range(n)]]
    while len(population) < size:
        population.append(_repair([rng.random() < p_init for _ in range(n)], counts, budget))

    best = math.inf

    def report(gen: int, pop) -> None:
        nonlocal best
        for bits in pop:
            value = objective(_key(bits))
            if value < best:
                best = value
                if trace:
                    trace(gen, make_selection(objective, _key(bits)))

    def ranked(pop):
        points = [objectives_of(b) for b in pop]
        rank = {}
        crowd = {}
        for r, front in enumerate(non_dominated_sort(points)):
            crowd.update(crowding_distance(points, front))
            for i in front:
                rank[i] = r
        region = [in_region(p, box) for p in points]
        return [(not region[i], rank[i], -crowd[i]) for i in range(len(pop))]

    report(0, population)
    for gen in range(1, config.generations + 1):
        keys = ranked(population)

        def tournament() -> list[bool]:
            a, b = rng.randbelow(len(population)), rng.randbelow(len(population))
            return population[a] if keys[a] <= keys[b] else population[b]

        offspring = []
        while len(offspring) < size:
            p1, p2 = tournament(), tournament()
            if rng.random() < CROSSOVER_P:
                swap = [rng.random() < 0.5 for _ in range(n)]
                c1 = [y if s else x for x, y, s in zip(p1, p2, swap)]
                c2 = [x if s else y for x, y, s in zip(p1, p2, swap)]
            else:
                c1, c2 = list(p1), list(p2)
            for child in (c1, c2):
                for i in range(n):
                    if rng.random() < p_mut:
                        child[i] = not child[i]
                offspring.append(_repair(child, counts, budget))

        union = list({_key(b): b for b in population + offspring}.values())
        union_keys = ranked(union)
        order = sorted(range(len(union)), key=lambda i: (union_keys[i], _key(union[i])))
        population = [union[i] for i in order[:size]]
        report(gen, population)

    # the final population is ranked so that its members are archived too
    ranked(population)
    members = [k for k in archive if k]
    if not members:
        empty = make_selection(objective, ())
        return [make_selection(objective, (), in_region=in_region(empty.group_objectives, box))]
    front = pareto_filter(np.array([archive[k] for k in members]))
    result = [make_selection(objective, members[i], in_region=in_region(archive[members[i]], box)) for i in front]
    result.sort(key=lambda s: (not s.in_region, s.objective, s.chosen))
    return result
