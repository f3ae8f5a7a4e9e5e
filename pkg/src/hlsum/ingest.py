"""Software artefacts from NDJSON exports and ``git log`` streams.

The git stream must come from::

    git log --pretty=format:%H%x1f%at%x1f%an%x1f%s%x1f%b%x1e

i.e. unit-separated fields and record-separated commits.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import IO, Iterable, Sequence

from hlsum import LoadError

KINDS = frozenset({"commit", "issue", "pull_request", "comment"})
KEYS = ("id", "kind", "timestamp", "author", "title", "body")
GIT_LOG_FORMAT = "%H%x1f%at%x1f%an%x1f%s%x1f%b%x1e"
FIELD_SEP = "\x1f"
RECORD_SEP = "\x1e"

_RFC3339 = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})[Tt ](\d{2}):(\d{2}):(\d{2})(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$"
)


@dataclass(frozen=True)
class Artefact:
    id: str
    kind: str
    timestamp: int
    author: str
    title: str
    body: str


@dataclass(frozen=True)
class TimeWindow:
    start: int
    end: int

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError("time window needs start < end")

    def __contains__(self, timestamp: int) -> bool:
        return self.start <= timestamp < self.end


def parse_timestamp(value) -> int:
    """UTC epoch seconds from an integer or an RFC-3339 string (fractions floored)."""
    if isinstance(value, bool):
        raise ValueError("boolean is not a timestamp")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite timestamp")
        return math.floor(value)
    text = str(value).strip()
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    m = _RFC3339.match(text)
    if not m:
        raise ValueError(f"not an RFC-3339 timestamp: {text!r}")
    year, month, day, hour, minute, second = (int(g) for g in m.groups()[:6])
    offset = m.group(8)
    if offset in ("Z", "z"):
        tz = timezone.utc
    else:
        sign = 1 if offset[0] == "+" else -1
        tz = timezone(sign * timedelta(hours=int(offset[1:3]), minutes=int(offset[4:6])))
    # leap second 60 folds into the next second
    dt = datetime(year, month, day, hour, minute, min(second, 59), tzinfo=tz)
    return int(dt.timestamp()) + (1 if second == 60 else 0)


def _artefact(obj: dict, lineno: int) -> Artefact:
    for key in KEYS:
        if key not in obj:
            raise LoadError(f"missing key {key!r} at line {lineno}")
    if obj["kind"] not in KINDS:
        raise LoadError(f"unknown kind {obj['kind']!r} at line {lineno}")
    try:
        ts = parse_timestamp(obj["timestamp"])
    except ValueError as exc:
        raise LoadError(f"invalid timestamp at line {lineno}: {exc}") from None
    if ts < 0:
        raise LoadError(f"negative timestamp at line {lineno}")
    return Artefact(
        id=str(obj["id"]),
        kind=obj["kind"],
        timestamp=ts,
        author=str(obj["author"] or ""),
        title=str(obj["title"] or ""),
        body=str(obj["body"] or ""),
    )


def read_ndjson(lines: Iterable[str]) -> list[Artefact]:
    artefacts = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LoadError(f"malformed line {lineno}: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise LoadError(f"malformed line {lineno}: expected a JSON object")
        art = _artefact(obj, lineno)
        if art.id in seen:
            raise LoadError(f"duplicate id {art.id!r} at line {lineno}")
        seen.add(art.id)
        artefacts.append(art)
    return artefacts


def _decoded_lines(path: Path):
    with path.open("rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            try:
                yield raw.decode("utf-8")
            except UnicodeDecodeError:
                raise LoadError(f"invalid UTF-8 at line {lineno}") from None


def load_ndjson(path: str | Path) -> list[Artefact]:
    return read_ndjson(_decoded_lines(Path(path)))


def dumps_ndjson(artefacts: Iterable[Artefact]) -> str:
    return "".join(json.dumps(asdict(a), ensure_ascii=False) + "\n" for a in artefacts)


def parse_git_log(stream: str | IO[str]) -> list[Artefact]:
    """One commit artefact per record of a separator-delimited ``git log`` stream.

    Git writes a newline between records; it is dropped from the start of each
    record. Bodies are otherwise kept exactly, trailing newlines included.
    """
    data = stream if isinstance(stream, str) else stream.read()
    artefacts = []
    for index, record in enumerate(data.split(RECORD_SEP)):
        record = record.lstrip("\r\n")
        if not record.strip():
            continue
        fields = record.split(FIELD_SEP)
        if len(fields) != 5:
            raise LoadError(f"git log record {index} has {len(fields)} fields, expected 5")
        sha, at, author, subject, body = fields
        try:
            ts = int(at)
        except ValueError:
            raise LoadError(f"git log record {index} has invalid author time {at!r}") from None
        artefacts.append(Artefact(id=sha, kind="commit", timestamp=ts, author=author, title=subject, body=body))
    return artefacts


def load_git_log(path: str | Path) -> list[Artefact]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return parse_git_log(fh)


def filter_window(artefacts: Sequence[Artefact], window: TimeWindow) -> list[Artefact]:
    """Artefacts with ``start <= timestamp < end``, in their original order."""
    return [a for a in artefacts if a.timestamp in window]
