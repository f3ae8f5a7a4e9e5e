"""Extractive summary search: pick sentences whose features match a target profile."""

from __future__ import annotations

from typing import Sequence

from hlsum.corpus import CorpusProfile, SummaryRecord
from hlsum.search.candidates import CandidateSentence, EmptyPoolError, extract_candidates
from hlsum.search.many import dominates, many_objective_summarize, non_dominated_sort, pareto_filter
from hlsum.search.objective import Objective, cosine_distance, evaluate
from hlsum.search.single import (
    SearchConfig,
    Selection,
    Trace,
    exhaustive_summarize,
    feasible_subsets,
    greedy_summarize,
    local_search_summarize,
)


def summarize(
    candidates: Sequence[CandidateSentence],
    profile: CorpusProfile,
    config: SearchConfig,
    target=None,
    records: Sequence[SummaryRecord] | None = None,
    trace: Trace | None = None,
) -> list[Selection]:
    """Run ``config.algorithm``; single-objective modes return one selection."""
    objective = Objective(candidates, profile, target)
    algo = config.algorithm
    if algo == "greedy":
        return [greedy_summarize(objective, config, trace=trace)]
    if algo == "local":
        start = greedy_summarize(objective, config, trace=trace)
        return [local_search_summarize(objective, config, start=start, trace=trace)]
    if algo == "exhaustive":
        return [exhaustive_summarize(objective, config)]
    return many_objective_summarize(objective, config, records=records, trace=trace)


def render_summary(selection: Selection, candidates: Sequence[CandidateSentence], cite: bool = True) -> str:
    """One sentence per line in chronological order, optionally tagged ``[artefact-id]``."""
    order = sorted(selection.chosen, key=lambda i: (candidates[i].timestamp, i))
    lines = []
    for i in order:
        cand = candidates[i]
        lines.append(f"{cand.text} [{cand.source_artefact_id}]" if cite else cand.text)
    return "".join(line + "\n" for line in lines)


__all__ = [
    "CandidateSentence",
    "EmptyPoolError",
    "Objective",
    "SearchConfig",
    "Selection",
    "cosine_distance",
    "dominates",
    "evaluate",
    "exhaustive_summarize",
    "extract_candidates",
    "feasible_subsets",
    "greedy_summarize",
    "local_search_summarize",
    "many_objective_summarize",
    "non_dominated_sort",
    "pareto_filter",
    "render_summary",
    "summarize",
]
