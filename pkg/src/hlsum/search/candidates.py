from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from hlsum import HlsumError
from hlsum.ingest import Artefact, TimeWindow, filter_window
from hlsum.text_core import segment_sentences, tokenize_words


class EmptyPoolError(HlsumError):
    def __init__(self, message: str = "empty candidate pool"):
        super().__init__(message)


@dataclass(frozen=True)
class CandidateSentence:
    index: int
    text: str
    source_artefact_id: str
    source_kind: str
    timestamp: int
    word_count: int


def extract_candidates(
    artefacts: Sequence[Artefact], window: TimeWindow | None = None, min_sentence_words: int = 4
) -> list[CandidateSentence]:
    """Sentence pool for the artefacts inside ``window``.

    Titles and bodies are segmented separately (commit subjects rarely end
    with a full stop). Internal whitespace is collapsed. Sentences shorter
    than ``min_sentence_words`` are dropped, as are case-folded repeats of an
    earlier sentence. Indices follow (timestamp, artefact id, position) order.
    """
    pool = filter_window(artefacts, window) if window is not None else list(artefacts)
    pool.sort(key=lambda a: (a.timestamp, a.id))

    seen: set[str] = set()
    out: list[CandidateSentence] = []
    for art in pool:
        for part in (art.title, art.body):
            for sentence in segment_sentences(part):
                text = " ".join(sentence.split())
                n_words = len(tokenize_words(text))
                if n_words < max(min_sentence_words, 1):
                    continue
                key = text.lower()
                if key in seen:
                    continue
                seen.add(key)
                out.append(
                    CandidateSentence(
                        index=len(out),
                        text=text,
                        source_artefact_id=art.id,
                        source_kind=art.kind,
                        timestamp=art.timestamp,
                        word_count=n_words,
                    )
                )
    if not out:
        raise EmptyPoolError()
    return out
