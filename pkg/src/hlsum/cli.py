"""Command-line interface.

Exit codes: 0 success, 1 data or runtime error, 2 usage error.

``--config FILE`` reads ``key = value`` lines whose keys are long flag names
(``budget = 80``, ``algo = local``); ``#`` starts a comment. Boolean flags take
``true``/``false``. Flags given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from hlsum import HlsumError, LoadError, __version__
from hlsum.corpus import GROUPINGS, CorpusProfile, augment_with_centroids, build_profile, load_corpus, standardize
from hlsum.embed.output import embedding_csv, scatter_svg
from hlsum.embed.tsne import TsneConfig, tsne_embed
from hlsum.features import FEATURE_NAMES, SCHEMA, SCHEMA_VERSION, extract_features, feature_matrix
from hlsum.ingest import TimeWindow, load_git_log, load_ndjson, parse_timestamp
from hlsum.search import (
    Objective,
    SearchConfig,
    Selection,
    exhaustive_summarize,
    extract_candidates,
    greedy_summarize,
    local_search_summarize,
    render_summary,
    summarize,
)

SUBCOMMANDS = ("features", "profile", "embed", "summarize", "oracle")
OPEN_END = 2**63 - 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- features


def _read_documents(source: str) -> list[tuple[str, str]]:
    if source == "-":
        data = sys.stdin.read()
        name = ""
    else:
        path = Path(source)
        data = path.read_text(encoding="utf-8")
        name = path.name.lower()
    if not data.strip():
        return []
    first = data.lstrip().splitlines()[0]
    if name.endswith((".ndjson", ".jsonl")) or first.startswith("{"):
        docs = []
        for lineno, line in enumerate(data.splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LoadError(f"malformed line {lineno}: {exc.msg}") from None
            if not isinstance(obj, dict) or "text" not in obj:
                raise LoadError(f"line {lineno} needs a 'text' key")
            docs.append((str(obj.get("id", len(docs) + 1)), str(obj["text"])))
        return docs
    if name.endswith(".csv"):
        reader = csv.DictReader(io.StringIO(data, newline=""))
        if "text" not in (reader.fieldnames or []):
            raise LoadError("CSV input needs a 'text' column")
        return [(str(row.get("id") or i), row["text"]) for i, row in enumerate(reader, 1)]
    return [("1", data)]


def _format_value(value: float, kind: str) -> str:
    return str(int(value)) if kind == "count" else repr(float(value))


def features_rows(docs: Sequence[tuple[str, str]], fmt: str) -> str:
    out = io.StringIO()
    if fmt == "csv":
        out.write(f"# schema_version={SCHEMA_VERSION}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("id",) + FEATURE_NAMES)
        for doc_id, text in docs:
            fv = extract_features(text)
            writer.writerow([doc_id] + [_format_value(v, f.kind) for v, f in zip(fv.values, SCHEMA)])
    else:
        for doc_id, text in docs:
            fv = extract_features(text)
            row = {
                "id": doc_id,
                "features": list(fv.values),
                "degenerate": fv.degenerate,
                "schema_version": fv.schema_version,
            }
            out.write(json.dumps(row) + "\n")
    return out.getvalue()


def cmd_features(args) -> int:
    sys.stdout.write(features_rows(_read_documents(args.input), args.format))
    return 0


# ----------------------------------------------------------------- profile


def cmd_profile(args) -> int:
    profile = build_profile(load_corpus(args.corpus))
    text = json.dumps(profile.to_json(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# ------------------------------------------------------------------- embed


def cmd_embed(args) -> int:
    records = load_corpus(args.corpus)
    profile = build_profile(records)
    z = standardize(feature_matrix(r.text for r in records), profile)
    labels = [r.label(args.group) for r in records]
    rows, groups, is_centroid = augment_with_centroids(z, labels)
    ids = [r.id for r in records] + [f"centroid:{g}" for g in groups[len(records):]]
    config = TsneConfig(
        perplexity=args.perplexity,
        iterations=args.iterations,
        learning_rate=args.learning_rate,
        seed=args.seed,
    )
    emb = tsne_embed(rows, config, tags=ids)
    table = embedding_csv(ids, groups, emb.points, is_centroid)
    if args.out_csv:
        Path(args.out_csv).write_text(table, encoding="utf-8")
    if args.out_svg:
        title = f"grouped by {args.group} (perplexity {emb.perplexity:g}, KL {emb.final_kl:.4f})"
        Path(args.out_svg).write_text(scatter_svg(groups, emb.points, is_centroid, title=title), encoding="utf-8")
    if args.out_meta:
        meta = {**emb.metadata(), "group": args.group}
        Path(args.out_meta).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    if not (args.out_csv or args.out_svg):
        sys.stdout.write(table)
    return 0


# --------------------------------------------------------------- summarize


def _window(args) -> TimeWindow | None:
    if args.from_ is None and args.to is None:
        return None
    try:
        start = parse_timestamp(args.from_) if args.from_ is not None else 0
        end = parse_timestamp(args.to) if args.to is not None else OPEN_END
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not start < end:
        raise UsageError("--from must be earlier than --to")
    return TimeWindow(start, end)


def _artefacts(args):
    artefacts = []
    for path in args.artefacts or []:
        artefacts.extend(load_ndjson(path))
    for path in getattr(args, "git_log", None) or []:
        artefacts.extend(load_git_log(path))
    if not (args.artefacts or getattr(args, "git_log", None)):
        raise UsageError("give --artefacts and/or --git-log")
    return artefacts


def _target(profile: CorpusProfile, group: str | None):
    if not group:
        return None
    grouping, _, label = group.partition(":")
    key = (grouping, label)
    if key not in profile.group_centroids:
        raise HlsumError(f"profile has no group centroid {group!r}")
    return profile.group_centroids[key]


def _selection_json(sel: Selection, extra: dict | None = None) -> dict:
    doc = {
        "chosen": list(sel.chosen),
        "objective": sel.objective,
        "group_objectives": [g if math.isfinite(g) else None for g in sel.group_objectives],
        "word_count": sel.word_count,
    }
    if sel.in_region is not None:
        doc["in_region"] = sel.in_region
    if extra:
        doc.update(extra)
    return doc


class _TraceWriter:
    def __init__(self, dest: str | None):
        self.dest = dest
        self.fh = None
        if dest and dest != "-":
            self.fh = open(dest, "w", encoding="utf-8")

    def __call__(self, phase: str):
        def emit(iteration: int, sel: Selection) -> None:
            line = json.dumps({"iter": iteration, "objective": sel.objective, "chosen": list(sel.chosen), "phase": phase})
            (self.fh or sys.stderr).write(line + "\n")

        return emit if self.dest else None

    def close(self):
        if self.fh:
            self.fh.close()


def _search_config(args, algorithm: str) -> SearchConfig:
    try:
        return SearchConfig(
            budget_words=args.budget,
            algorithm=algorithm,
            iterations=args.iterations,
            generations=getattr(args, "generations", 200),
            population=getattr(args, "population", 60),
            seed=args.seed,
            min_sentence_words=args.min_words,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_summarize(args) -> int:
    config = _search_config(args, args.algo)
    profile = CorpusProfile.load(args.target)
    target = _target(profile, args.target_group)
    records = load_corpus(args.corpus) if args.corpus else None
    candidates = extract_candidates(_artefacts(args), _window(args), config.min_sentence_words)

    tracer = _TraceWriter(args.trace)
    try:
        if args.algo == "local":
            objective = Objective(candidates, profile, target)
            start = greedy_summarize(objective, config, trace=tracer("greedy"))
            results = [local_search_summarize(objective, config, start=start, trace=tracer("local"))]
        else:
            results = summarize(candidates, profile, config, target=target, records=records, trace=tracer(args.algo))
    finally:
        tracer.close()

    best = results[0]
    text = render_summary(best, candidates, cite=not args.no_cite)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.front_out and args.algo == "many":
        with open(args.front_out, "w", encoding="utf-8") as fh:
            for sel in results:
                fh.write(json.dumps(_selection_json(sel, {"summary": sel.summary_text})) + "\n")
    return 0


def cmd_oracle(args) -> int:
    config = _search_config(args, "exhaustive")
    profile = CorpusProfile.load(args.target)
    target = _target(profile, args.target_group)
    candidates = extract_candidates(_artefacts(args), _window(args), config.min_sentence_words)
    objective = Objective(candidates, profile, target)
    optimum = exhaustive_summarize(objective, config)
    greedy = greedy_summarize(objective, config)
    local = local_search_summarize(objective, config, start=greedy)
    report = {
        "n_candidates": len(candidates),
        "budget_words": config.budget_words,
        "optimum": _selection_json(optimum, {"summary": optimum.summary_text}),
        "greedy": _selection_json(greedy),
        "local": _selection_json(local),
        "local_attains_optimum": local.objective == optimum.objective,
    }
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlsum", description="Feature profiles of human summaries and search-based extractive summaries."
    )
    parser.add_argument("--version", action="version", version=f"hlsum {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("features", help="27-feature vectors, one row per input document")
    p.add_argument("--input", default="-", help="NDJSON ({id, text}), CSV with a text column, or plain text; '-' = stdin")
    p.add_argument("--format", choices=("csv", "ndjson"), default="csv")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("profile", help="build a target profile from a corpus of human summaries")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", help="profile JSON path (default: stdout)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("embed", help="2D t-SNE projection of a corpus with group centroids")
    p.add_argument("--corpus", required=True)
    p.add_argument("--group", choices=GROUPINGS, default="course")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-csv")
    p.add_argument("--out-svg")
    p.add_argument("--out-meta", help="run metadata JSON (config, final KL)")
    p.set_defaults(func=cmd_embed)

    def selection_flags(p, iterations_default=5000):
        p.add_argument("--artefacts", nargs="+", action="extend", metavar="FILE", help="NDJSON artefact exports")
        p.add_argument("--git-log", action="append", metavar="FILE", help="output of git log --pretty=format:" + "%%H%%x1f%%at%%x1f%%an%%x1f%%s%%x1f%%b%%x1e")
        p.add_argument("--from", dest="from_", metavar="TS", help="window start, epoch seconds or RFC-3339 (inclusive)")
        p.add_argument("--to", metavar="TS", help="window end, epoch seconds or RFC-3339 (exclusive)")
        p.add_argument("--target", required=True, metavar="PROFILE", help="profile JSON written by 'hlsum profile'")
        p.add_argument("--target-group", metavar="GROUPING:LABEL", help="aim at a group centroid, e.g. team:T5")
        p.add_argument("--budget", type=int, default=120, help="word budget (default 120)")
        p.add_argument("--min-words", type=int, default=4, help="drop sentences shorter than this")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--iterations", type=int, default=iterations_default, help="local search evaluation limit")

    p = sub.add_parser(
        "summarize",
        help="summarize repository activity in a time window",
        description="Pick sentences from the commits, issues and comments of a time window so that the "
        "summary reads like the human-written summaries behind the target profile.",
    )
    selection_flags(p)
    p.add_argument("--algo", choices=("greedy", "local", "many", "exhaustive"), default="local")
    p.add_argument("--generations", type=int, default=200)
    p.add_argument("--population", type=int, default=60)
    p.add_argument("--corpus", help="corpus for the target region (many); default: radii stored in the profile")
    p.add_argument("--trace", nargs="?", const="-", metavar="FILE", help="NDJSON line per accepted improvement (default: stderr)")
    p.add_argument("--out", help="write the summary here instead of stdout")
    p.add_argument("--no-cite", action="store_true", help="omit [artefact-id] markers")
    p.add_argument("--front-out", metavar="FILE", help="NDJSON of the non-dominated front (many)")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("oracle", help="exhaustive optimum for small pools (at most 20 candidates)")
    selection_flags(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def _config_tokens(path: str, parser: argparse.ArgumentParser, command: str) -> list[str]:
    subparser = parser._subparsers._group_actions[0].choices[command]  # noqa: SLF001
    flags = {}
    for action in subparser._actions:  # noqa: SLF001
        for opt in action.option_strings:
            if opt.startswith("--"):
                flags[opt[2:]] = action
    tokens: list[str] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("_", "-"), value.strip()
        if not sep or key not in flags or key in ("help", "config"):
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        action = flags[key]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append("--" + key)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"{path}:{lineno}: {key} expects true or false")
        elif action.nargs in ("+", "*"):
            tokens.extend(["--" + key, *value.split()])
        else:
            tokens.extend(["--" + key, value])
    return tokens


def _expand_config(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    rest, config = [], None
    it = iter(argv)
    for arg in it:
        if arg == "--config":
            config = next(it, None)
            if config is None:
                raise UsageError("--config needs a file")
        elif arg.startswith("--config="):
            config = arg.split("=", 1)[1]
        else:
            rest.append(arg)
    command = next((a for a in rest if a in SUBCOMMANDS), None)
    if command is None:
        raise UsageError("--config needs a subcommand")
    pos = rest.index(command) + 1
    return rest[:pos] + _config_tokens(config, parser, command) + rest[pos:]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv, parser)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hlsum: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    except (HlsumError, OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hlsum: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
