"""Rule-based sentence segmentation, word tokenization and syllable counting.

Conventions, fixed so every downstream number is reproducible:

* A sentence ends at a run of ``.``, ``!`` or ``?`` (optionally followed by
  closing quotes or brackets) that is followed by whitespace or end of text.
* A lone ``.`` does not end a sentence after a single letter ("A.") or after
  one of :data:`ABBREVIATIONS`.
* A blank line (two newlines with only spaces or tabs between) also ends a
  sentence, so unpunctuated paragraphs and list items stay apart.
* Nothing splits inside a triple-backtick fence; an unclosed fence runs to the
  end of the text.
* Words are maximal runs of letters, digits and apostrophes, with apostrophes
  trimmed from both ends. Case is preserved; statistics case-fold with
  :meth:`str.lower`.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

ABBREVIATIONS = frozenset({"e.g.", "i.e.", "etc.", "vs.", "dr.", "mr.", "ms."})

_TERMINATOR = re.compile(r"[.!?]+[\"')\]]*(?=\s|$)")
_BLANK_LINE = re.compile(r"\n[ \t]*\r?\n")
_FENCE = "```"
_WORD = re.compile(r"(?:[^\W_]|['’])+")
_APOSTROPHES = "'’"
_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_OPENERS = "([{\"'"

COMPLEX_SYLLABLES = 3
LONG_WORD_LETTERS = 7


def _fence_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    pos = 0
    while True:
        start = text.find(_FENCE, pos)
        if start < 0:
            return spans
        end = text.find(_FENCE, start + len(_FENCE))
        if end < 0:
            spans.append((start, len(text)))
            return spans
        end += len(_FENCE)
        spans.append((start, end))
        pos = end


def _is_abbreviation(text: str, dot: int) -> bool:
    word_start = dot
    while word_start > 0 and not text[word_start - 1].isspace():
        word_start -= 1
    prev = text[word_start:dot].lstrip(_OPENERS)
    if len(prev) == 1 and prev.isalpha():
        return True
    return (prev + ".").lower() in ABBREVIATIONS


def segment_sentences(text: str) -> list[str]:
    """Split ``text`` into sentences.

    Returned sentences are stripped of surrounding whitespace; together they
    cover every non-whitespace character of the input, so trailing text
    without a terminator becomes a final sentence.

    >>> segment_sentences("Fixed the bug. Tests pass!")
    ['Fixed the bug.', 'Tests pass!']
    """
    fences = _fence_spans(text)
    cuts = []
    for match in _TERMINATOR.finditer(text):
        if any(a <= match.start() < b for a, b in fences):
            continue
        if match.group().rstrip("\"')]") == "." and _is_abbreviation(text, match.start()):
            continue
        cuts.append(match.end())
    for match in _BLANK_LINE.finditer(text):
        if not any(a <= match.start() < b for a, b in fences):
            cuts.append(match.start())
    sentences = []
    start = 0
    for cut in sorted(cuts):
        piece = text[start:cut].strip()
        if piece:
            sentences.append(piece)
        start = max(start, cut)
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokenize_words(text: str) -> list[str]:
    tokens = []
    for match in _WORD.finditer(text):
        token = match.group().strip(_APOSTROPHES)
        if token:
            tokens.append(token)
    return tokens


@lru_cache(maxsize=65536)
def count_syllables(word: str) -> int:
    """Heuristic syllable count of a single token.

    Counts maximal groups of a/e/i/o/u/y, drops a terminal silent "e" that
    forms its own group (but keeps consonant + "le"), and never reports fewer
    than one syllable for a word with a letter. All-digit tokens have none.
    """
    if not any(c.isalpha() for c in word):
        return 0
    w = word.lower()
    count = len(_VOWEL_GROUP.findall(w))
    if (
        len(w) >= 2
        and w.endswith("e")
        and w[-2] not in "aeiouy"
        and not (w.endswith("le") and len(w) >= 3 and w[-3].isalpha() and w[-3] not in "aeiouy")
    ):
        count -= 1
    return max(count, 1)


def letter_count(word: str) -> int:
    return sum(1 for c in word if c.isalpha())


@dataclass(frozen=True)
class TextStats:
    sentence_count: int = 0
    word_count: int = 0
    char_count: int = 0
    syllable_count: int = 0
    unique_word_count: int = 0
    hapax_count: int = 0
    complex_word_count: int = 0
    long_word_count: int = 0
    monosyllable_count: int = 0
    token_frequencies: dict[str, int] = field(default_factory=dict)
    char_frequencies: dict[str, int] = field(default_factory=dict)


def compute_stats(text: str) -> TextStats:
    """Raw counts for ``text``.

    Only sentences containing at least one word are counted, so a text has
    words exactly when it has sentences. ``char_count`` and
    ``char_frequencies`` cover case-folded letters and digits only.
    """
    sentence_count = 0
    words: list[str] = []
    for sentence in segment_sentences(text):
        tokens = tokenize_words(sentence)
        if tokens:
            sentence_count += 1
            words.extend(tokens)

    token_freq = Counter(w.lower() for w in words)
    char_freq = Counter(c for c in text.lower() if c.isalnum())
    syllables = [count_syllables(w) for w in words]
    return TextStats(
        sentence_count=sentence_count,
        word_count=len(words),
        char_count=sum(char_freq.values()),
        syllable_count=sum(syllables),
        unique_word_count=len(token_freq),
        hapax_count=sum(1 for c in token_freq.values() if c == 1),
        complex_word_count=sum(1 for s in syllables if s >= COMPLEX_SYLLABLES),
        long_word_count=sum(1 for w in words if letter_count(w) >= LONG_WORD_LETTERS),
        monosyllable_count=sum(1 for s in syllables if s == 1),
        token_frequencies=dict(token_freq),
        char_frequencies=dict(char_freq),
    )
