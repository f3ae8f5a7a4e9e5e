"""The 27-feature characterization of a text.

The schema order is part of every file format the package writes; indices
never move. Readability formulas use W words, S sentences, Y syllables,
C letters+digits, X complex words (3+ syllables) and L long words (7+ letters).
Any ratio whose denominator is zero evaluates to 0 and marks the vector
degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from hlsum.text_core import TextStats, compute_stats

SCHEMA_VERSION = "hlsum-features/1"


class Feature(NamedTuple):
    name: str
    category: str  # lexical | readability | entropy
    kind: str  # count | ratio | score | bits


SCHEMA: tuple[Feature, ...] = (
    Feature("word_count", "lexical", "count"),
    Feature("sentence_count", "lexical", "count"),
    Feature("char_count", "lexical", "count"),
    Feature("syllable_count", "lexical", "count"),
    Feature("avg_sentence_length_words", "lexical", "score"),
    Feature("avg_word_length_chars", "lexical", "score"),
    Feature("avg_syllables_per_word", "lexical", "score"),
    Feature("unique_word_count", "lexical", "count"),
    Feature("type_token_ratio", "lexical", "ratio"),
    Feature("hapax_count", "lexical", "count"),
    Feature("hapax_ratio", "lexical", "ratio"),
    Feature("complex_word_count", "lexical", "count"),
    Feature("complex_word_ratio", "lexical", "ratio"),
    Feature("long_word_count", "lexical", "count"),
    Feature("long_word_ratio", "lexical", "ratio"),
    Feature("monosyllable_ratio", "lexical", "ratio"),
    Feature("flesch_reading_ease", "readability", "score"),
    Feature("flesch_kincaid_grade", "readability", "score"),
    Feature("gunning_fog", "readability", "score"),
    Feature("smog", "readability", "score"),
    Feature("coleman_liau", "readability", "score"),
    Feature("ari", "readability", "score"),
    Feature("lix", "readability", "score"),
    Feature("rix", "readability", "score"),
    Feature("char_entropy", "entropy", "bits"),
    Feature("word_entropy", "entropy", "bits"),
    Feature("word_entropy_normalized", "entropy", "ratio"),
)

FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in SCHEMA)
N_FEATURES = len(SCHEMA)
INDEX = {name: i for i, name in enumerate(FEATURE_NAMES)}

CATEGORIES = ("readability", "lexical", "entropy")
# Coordinate indices per category, in the order group objectives are reported.
CATEGORY_INDICES: dict[str, tuple[int, ...]] = {
    cat: tuple(i for i, f in enumerate(SCHEMA) if f.category == cat) for cat in CATEGORIES
}

READABILITY_NAMES = FEATURE_NAMES[16:24]


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    degenerate: bool = False
    schema_version: str = SCHEMA_VERSION

    def __getitem__(self, name: str) -> float:
        return self.values[INDEX[name]]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.values))


def shannon_entropy(frequencies: Mapping[object, int]) -> float:
    """Entropy in bits of the distribution given by symbol counts.

    >>> shannon_entropy({"a": 2, "b": 1, "c": 1})
    1.5
    """
    total = sum(frequencies.values())
    if total == 0:
        return 0.0
    h = 0.0
    for count in frequencies.values():
        if count > 0:
            p = count / total
            h -= p * math.log2(p)
    # -0.0 for a single symbol
    return h + 0.0


def _div(num: float, den: float) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def readability_suite(stats: TextStats) -> tuple[dict[str, float], bool]:
    """The eight readability scores and whether a denominator was zero."""
    w, s = stats.word_count, stats.sentence_count
    if w == 0 or s == 0:
        return dict.fromkeys(READABILITY_NAMES, 0.0), True
    y, c = stats.syllable_count, stats.char_count
    x, long_ = stats.complex_word_count, stats.long_word_count
    wps = w / s
    spw = y / w
    scores = {
        "flesch_reading_ease": 206.835 - 1.015 * wps - 84.6 * spw,
        "flesch_kincaid_grade": 0.39 * wps + 11.8 * spw - 15.59,
        "gunning_fog": 0.4 * (wps + 100.0 * x / w),
        "smog": 1.0430 * math.sqrt(x * 30.0 / s) + 3.1291,
        "coleman_liau": 5.88 * c / w - 29.6 * s / w - 15.8,
        "ari": 4.71 * c / w + 0.5 * wps - 21.43,
        "lix": wps + 100.0 * long_ / w,
        "rix": long_ / s,
    }
    return scores, False


def features_from_stats(stats: TextStats) -> FeatureVector:
    w = stats.word_count
    flags = []

    def ratio(num: float, den: float) -> float:
        value, degenerate = _div(num, den)
        flags.append(degenerate)
        return value

    word_entropy = shannon_entropy(stats.token_frequencies)
    if stats.unique_word_count > 1:
        normalized = word_entropy / math.log2(stats.unique_word_count)
    else:
        normalized = 0.0
        flags.append(True)

    lexical = [
        w,
        stats.sentence_count,
        stats.char_count,
        stats.syllable_count,
        ratio(w, stats.sentence_count),
        ratio(stats.char_count, w),
        ratio(stats.syllable_count, w),
        stats.unique_word_count,
        ratio(stats.unique_word_count, w),
        stats.hapax_count,
        ratio(stats.hapax_count, w),
        stats.complex_word_count,
        ratio(stats.complex_word_count, w),
        stats.long_word_count,
        ratio(stats.long_word_count, w),
        ratio(stats.monosyllable_count, w),
    ]
    scores, degenerate = readability_suite(stats)
    flags.append(degenerate)
    entropy = [shannon_entropy(stats.char_frequencies), word_entropy, min(normalized, 1.0)]
    values = tuple(float(v) for v in lexical + [scores[n] for n in READABILITY_NAMES] + entropy)
    return FeatureVector(values=values, degenerate=any(flags))


def extract_features(text: str) -> FeatureVector:
    """Compute all 27 features of ``text`` from a single statistics pass.

    >>> fv = extract_features("The cat sat. The cat ran.")
    >>> round(fv["flesch_reading_ease"], 2)
    119.19
    """
    return features_from_stats(compute_stats(text))


def feature_matrix(texts) -> np.ndarray:
    """Stack feature vectors of ``texts`` into an ``(n, 27)`` array."""
    rows = [extract_features(t).values for t in texts]
    if not rows:
        return np.zeros((0, N_FEATURES))
    return np.array(rows, dtype=float)
