"""Corpora of human-written summaries and the target profiles built from them."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from hlsum import HlsumError, LoadError
from hlsum.features import CATEGORIES, CATEGORY_INDICES, FEATURE_NAMES, N_FEATURES, SCHEMA_VERSION, feature_matrix

GROUPINGS = ("course", "team", "week")
COLUMNS = ("id", "course", "team", "week", "text")


@dataclass(frozen=True)
class SummaryRecord:
    id: str
    course: str
    team: str
    week: int
    text: str

    def label(self, grouping: str) -> str:
        return str(getattr(self, grouping))


def _record(row: dict, where: str) -> SummaryRecord:
    missing = [c for c in COLUMNS if c not in row or row[c] is None]
    if missing:
        raise LoadError(f"missing column {missing[0]!r} at {where}")
    raw = row["week"]
    try:
        if isinstance(raw, bool):
            raise ValueError
        week = raw if isinstance(raw, int) else int(str(raw).strip())
    except ValueError:
        raise LoadError(f"invalid week at {where}") from None
    if week < 1:
        raise LoadError(f"invalid week at {where}")
    return SummaryRecord(
        id=str(row["id"]), course=str(row["course"]), team=str(row["team"]), week=week, text=str(row["text"])
    )


def load_corpus(path: str | Path) -> list[SummaryRecord]:
    """Read a corpus from CSV (header ``id,course,team,week,text``) or NDJSON.

    Files ending in ``.ndjson`` or ``.jsonl`` are read as NDJSON, everything
    else as CSV. Rows are numbered from 1, excluding the CSV header.
    """
    path = Path(path)
    records: list[SummaryRecord] = []
    seen: set[str] = set()

    if path.suffix.lower() in (".ndjson", ".jsonl"):
        with path.open(encoding="utf-8") as fh:
            rows = []
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise LoadError(f"malformed JSON at row {lineno}: {exc.msg}") from None
                if not isinstance(obj, dict):
                    raise LoadError(f"malformed JSON at row {lineno}: expected an object")
                rows.append((lineno, obj))
    else:
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for col in COLUMNS:
                if col not in header:
                    raise LoadError(f"missing column {col!r} in header")
            rows = list(enumerate(reader, 1))

    for rowno, row in rows:
        rec = _record(row, f"row {rowno}")
        if rec.id in seen:
            raise LoadError(f"duplicate id at row {rowno}")
        seen.add(rec.id)
        records.append(rec)
    return records


@dataclass(frozen=True)
class CorpusProfile:
    """Per-feature statistics of a corpus; ``centroid`` is the mean vector.

    ``group_centroids`` maps ``(grouping, label)`` to that group's mean and
    ``group_sizes`` to its member count. ``region`` holds, per category, the
    largest standardized distance of any record to the centroid.
    """

    n: int
    mean: np.ndarray
    std: np.ndarray
    group_centroids: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    group_sizes: dict[tuple[str, str], int] = field(default_factory=dict)
    region: dict[str, float] | None = None
    schema_version: str = SCHEMA_VERSION

    @property
    def centroid(self) -> np.ndarray:
        return self.mean

    def groups(self, grouping: str) -> list[str]:
        return [label for g, label in self.group_centroids if g == grouping]

    def to_json(self) -> dict:
        nested: dict[str, dict[str, list[float]]] = {}
        sizes: dict[str, dict[str, int]] = {}
        for (grouping, label), vec in self.group_centroids.items():
            nested.setdefault(grouping, {})[label] = vec.tolist()
            sizes.setdefault(grouping, {})[label] = self.group_sizes[(grouping, label)]
        doc = {
            "schema_version": self.schema_version,
            "features": list(FEATURE_NAMES),
            "standardized": "zscore-population",
            "n": self.n,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "centroid": self.mean.tolist(),
            "group_centroids": nested,
            "group_sizes": sizes,
        }
        if self.region is not None:
            doc["region"] = dict(self.region)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "CorpusProfile":
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise LoadError(f"unsupported profile schema {doc.get('schema_version')!r}")
        mean = np.array(doc["mean"], dtype=float)
        std = np.array(doc["std"], dtype=float)
        if mean.shape != (N_FEATURES,) or std.shape != (N_FEATURES,):
            raise LoadError("profile vectors must have 27 entries")
        centroids = {}
        sizes = {}
        for grouping, groups in doc.get("group_centroids", {}).items():
            for label, vec in groups.items():
                centroids[(grouping, label)] = np.array(vec, dtype=float)
                sizes[(grouping, label)] = int(doc.get("group_sizes", {}).get(grouping, {}).get(label, 0))
        return cls(
            n=int(doc["n"]),
            mean=mean,
            std=std,
            group_centroids=centroids,
            group_sizes=sizes,
            region=doc.get("region"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CorpusProfile":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise LoadError(f"malformed profile JSON: {exc.msg}") from None
        try:
            return cls.from_json(doc)
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"malformed profile: {exc}") from None


def profile_from_vectors(
    vectors: np.ndarray, labels: dict[str, Sequence[str]] | None = None
) -> CorpusProfile:
    """Build a profile from an ``(n, 27)`` feature matrix.

    ``labels`` maps each grouping name to one label per row.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise HlsumError("cannot profile an empty corpus")
    mean = vectors.mean(axis=0)
    std = vectors.std(axis=0)  # population std
    centroids = {}
    sizes = {}
    for grouping, row_labels in (labels or {}).items():
        row_labels = list(row_labels)
        for label in sorted(set(row_labels), key=_label_key):
            mask = np.array([lab == label for lab in row_labels])
            centroids[(grouping, label)] = vectors[mask].mean(axis=0)
            sizes[(grouping, label)] = int(mask.sum())
    profile = CorpusProfile(n=len(vectors), mean=mean, std=std, group_centroids=centroids, group_sizes=sizes)
    return replace(profile, region=region_radii(vectors, profile))


def _label_key(label: str):
    # numeric labels (weeks) sort numerically, others lexically
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def build_profile(records: Sequence[SummaryRecord]) -> CorpusProfile:
    if not records:
        raise HlsumError("cannot profile an empty corpus")
    vectors = feature_matrix(r.text for r in records)
    labels = {g: [r.label(g) for r in records] for g in GROUPINGS}
    return profile_from_vectors(vectors, labels)


def standardize(vector, profile: CorpusProfile) -> np.ndarray:
    """Z-score ``vector`` (or each row of a matrix) against ``profile``.

    Coordinates whose corpus std is zero map to 0.
    """
    x = np.asarray(vector, dtype=float)
    safe = np.where(profile.std > 0, profile.std, 1.0)
    z = (x - profile.mean) / safe
    return np.where(profile.std > 0, z, 0.0)


def scale(vector, profile: CorpusProfile) -> np.ndarray:
    """Divide by the corpus std without centering; zero-std coordinates map to 0."""
    x = np.asarray(vector, dtype=float)
    safe = np.where(profile.std > 0, profile.std, 1.0)
    return np.where(profile.std > 0, x / safe, 0.0)


def block_distances(vector, target, profile: CorpusProfile) -> tuple[float, float, float]:
    """Standardized Euclidean distance per category (readability, lexical, entropy)."""
    diff = standardize(vector, profile) - standardize(target, profile)
    return tuple(float(np.sqrt(np.sum(diff[list(CATEGORY_INDICES[c])] ** 2))) for c in CATEGORIES)


def region_radii(vectors: np.ndarray, profile: CorpusProfile, target=None) -> dict[str, float]:
    """Per-category radius of the box spanned by corpus members around ``target``.

    ``target`` defaults to the corpus centroid.
    """
    target = profile.mean if target is None else np.asarray(target, dtype=float)
    dists = np.array([block_distances(v, target, profile) for v in np.asarray(vectors, dtype=float)])
    return {c: float(dists[:, k].max()) for k, c in enumerate(CATEGORIES)}


def augment_with_centroids(
    vectors: np.ndarray, labels: Sequence[str]
) -> tuple[np.ndarray, list[str], list[bool]]:
    """Append one mean row per group after the input rows.

    Returns the augmented matrix, the group label of every output row, and a
    flag marking centroid rows. Groups appear in order of first occurrence.
    """
    vectors = np.asarray(vectors, dtype=float)
    labels = list(labels)
    if len(labels) != len(vectors):
        raise ValueError("every vector needs a group label")
    order = list(dict.fromkeys(labels))
    centroid_rows = [vectors[[lab == g for lab in labels]].mean(axis=0) for g in order]
    if centroid_rows:
        out = np.vstack([vectors, np.array(centroid_rows)])
    else:
        out = vectors.copy()
    return out, labels + order, [False] * len(labels) + [True] * len(order)


def records_matrix(records: Iterable[SummaryRecord]) -> np.ndarray:
    return feature_matrix(r.text for r in records)
