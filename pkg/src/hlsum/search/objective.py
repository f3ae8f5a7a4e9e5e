"""Distance of a candidate subset's summary to a target feature profile.

The scalar objective is a cosine distance between std-scaled feature vectors
(features divided by the corpus std, not centered: the corpus centroid would
otherwise standardize to the zero vector and leave the cosine undefined).
The three group objectives are Euclidean distances between z-scored vectors
on the readability, lexical and entropy coordinates; centering cancels in a
difference, so both spaces agree there.

Features are computed on the chosen sentences joined by blank lines, which
keeps each candidate one sentence even when it lacks closing punctuation
(commit subjects usually do).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from hlsum.corpus import CorpusProfile, block_distances, scale
from hlsum.features import extract_features
from hlsum.search.candidates import CandidateSentence

WORST = 2.0
EMPTY_GROUPS = (math.inf, math.inf, math.inf)


def cosine_distance(u, v) -> float:
    """1 - cos(u, v), clipped to [0, 2].

    Two zero vectors are identical (distance 0); a zero vector against a
    non-zero one is orthogonal to it (distance 1).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu == 0.0 and nv == 0.0:
        return 0.0
    if nu == 0.0 or nv == 0.0:
        return 1.0
    cos = float(np.dot(u, v)) / (nu * nv)
    return min(max(1.0 - cos, 0.0), WORST)


@dataclass(frozen=True)
class Evaluation:
    objective: float
    group_objectives: tuple[float, float, float]


class Objective:
    """Cached evaluator of candidate subsets against one target.

    ``target`` is a raw 27-feature vector; it defaults to the profile centroid.
    """

    def __init__(self, candidates: Sequence[CandidateSentence], profile: CorpusProfile, target=None):
        self.candidates = list(candidates)
        self.profile = profile
        self.target = np.asarray(profile.centroid if target is None else target, dtype=float)
        self._target_scaled = scale(self.target, profile)
        self._cache: dict[tuple[int, ...], Evaluation] = {}
        self.evaluations = 0

    def order(self, chosen: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted(set(chosen), key=lambda i: (self.candidates[i].timestamp, i)))

    def summary_text(self, chosen: Iterable[int]) -> str:
        return " ".join(self.candidates[i].text for i in self.order(chosen))

    def feature_text(self, chosen: Iterable[int]) -> str:
        return "\n\n".join(self.candidates[i].text for i in self.order(chosen))

    def words(self, chosen: Iterable[int]) -> int:
        return sum(self.candidates[i].word_count for i in set(chosen))

    def evaluate(self, chosen: Iterable[int]) -> Evaluation:
        key = tuple(sorted(set(chosen)))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.evaluations += 1
        if not key:
            result = Evaluation(WORST, EMPTY_GROUPS)
        else:
            vec = extract_features(self.feature_text(key)).as_array()
            result = Evaluation(
                cosine_distance(scale(vec, self.profile), self._target_scaled),
                block_distances(vec, self.target, self.profile),
            )
        self._cache[key] = result
        return result

    def __call__(self, chosen: Iterable[int]) -> float:
        return self.evaluate(chosen).objective

    def evaluated(self) -> dict[tuple[int, ...], Evaluation]:
        return dict(self._cache)


def evaluate(chosen, candidates, profile: CorpusProfile, target=None) -> tuple[float, tuple[float, float, float]]:
    """Objective and group objectives of one subset (uncached convenience)."""
    result = Objective(candidates, profile, target).evaluate(chosen)
    return result.objective, result.group_objectives
