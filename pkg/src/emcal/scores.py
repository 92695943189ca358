"""Prediction-score data model and its JSONL/CSV file formats.

A score file holds one positive-class probability per candidate pair,
with its true label and optional run/subrun/split tags. Everything
downstream (metrics, calibration, reports) consumes `ScoreSet`s.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError, EmptyInputError, ParseError

SPLITS = ("train", "val", "test")
_JSON_KEYS = {"id", "score", "label", "run", "subrun", "split"}
_CSV_HEADER = ["id", "score", "label", "run", "subrun", "split"]


@dataclass(frozen=True)
class PredictionRecord:
    """One prediction: positive-class probability plus ground truth."""

    id: str
    score: float
    label: int
    run: int = 0
    subrun: int = 0
    split: str = "test"

    def __post_init__(self):
        if not self.id:
            raise DomainError("record id must be non-empty")
        if not isinstance(self.score, float) or not math.isfinite(self.score):
            raise DomainError(f"score must be a finite number, got {self.score!r}")
        if not 0.0 <= self.score <= 1.0:
            raise DomainError(f"score {self.score} outside [0, 1]")
        if self.label not in (0, 1):
            raise DomainError(f"label must be 0 or 1, got {self.label!r}")
        if self.run < 0 or self.subrun < 0:
            raise DomainError("run/subrun must be non-negative")
        if self.split not in SPLITS:
            raise DomainError(f"split must be one of {SPLITS}, got {self.split!r}")


@dataclass(frozen=True)
class ScoreSet:
    """Ordered, immutable collection of records from one evaluation."""

    records: tuple[PredictionRecord, ...]
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.records)

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(r.score for r in self.records)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(r.label for r in self.records)

    def with_scores(self, scores, provenance: str | None = None) -> "ScoreSet":
        """Copy with scores replaced positionally; labels/ids untouched."""
        scores = list(scores)
        if len(scores) != len(self.records):
            raise DomainError("replacement score vector has wrong length")
        recs = tuple(replace(r, score=float(s)) for r, s in zip(self.records, scores))
        return ScoreSet(recs, provenance if provenance is not None else self.provenance)


@dataclass(frozen=True)
class ValidationReport:
    record_count: int
    positive_fraction: float
    violations: tuple[tuple[int, str], ...] = field(default_factory=tuple)

    @property
    def accepted(self) -> bool:
        return not self.violations


def _record_from_mapping(obj: dict, line: int) -> PredictionRecord:
    unknown = set(obj) - _JSON_KEYS
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", line)
    for key in ("id", "score", "label"):
        if key not in obj:
            raise ParseError(f"missing required key {key!r}", line)
    if not isinstance(obj["id"], str):
        raise ParseError("id must be a string", line)
    if isinstance(obj["score"], bool) or not isinstance(obj["score"], (int, float)):
        raise ParseError("score must be a number", line)
    if isinstance(obj["label"], bool) or not isinstance(obj["label"], int):
        raise ParseError("label must be an integer", line)
    for key in ("run", "subrun"):
        if key in obj and (isinstance(obj[key], bool) or not isinstance(obj[key], int)):
            raise ParseError(f"{key} must be an integer", line)
    if "split" in obj and not isinstance(obj["split"], str):
        raise ParseError("split must be a string", line)
    try:
        return PredictionRecord(
            id=obj["id"],
            score=float(obj["score"]),
            label=obj["label"],
            run=obj.get("run", 0),
            subrun=obj.get("subrun", 0),
            split=obj.get("split", "test"),
        )
    except DomainError as exc:
        raise ParseError(str(exc), line) from exc


def _parse_jsonl(text: str) -> list[PredictionRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from exc
        if not isinstance(obj, dict):
            raise ParseError("each line must be a JSON object", lineno)
        records.append(_record_from_mapping(obj, lineno))
    return records


def _parse_csv(text: str) -> list[PredictionRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing CSV header", 1) from None
    if header != _CSV_HEADER:
        raise ParseError(f"header must be {','.join(_CSV_HEADER)}", 1)
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(_CSV_HEADER):
            raise ParseError(f"expected {len(_CSV_HEADER)} cells, got {len(row)}", lineno)
        rid, score, label, run, subrun, split = row
        obj: dict = {"id": rid}
        try:
            obj["score"] = float(score)
        except ValueError:
            raise ParseError(f"score {score!r} is not a number", lineno) from None
        if not math.isfinite(obj["score"]):
            raise ParseError(f"score must be finite, got {score!r}", lineno)
        try:
            obj["label"] = int(label)
        except ValueError:
            raise ParseError(f"label {label!r} is not an integer", lineno) from None
        for key, cell in (("run", run), ("subrun", subrun)):
            if cell != "":
                try:
                    obj[key] = int(cell)
                except ValueError:
                    raise ParseError(f"{key} {cell!r} is not an integer", lineno) from None
        if split != "":
            obj["split"] = split
        records.append(_record_from_mapping(obj, lineno))
    return records


def parse_scores(raw: bytes | str, format: str = "jsonl", provenance: str = "") -> ScoreSet:
    """Parse a score file. Raises a located ParseError on any bad line."""
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8: {exc.reason}") from exc
    else:
        text = raw
    if format == "jsonl":
        records = _parse_jsonl(text)
    elif format == "csv":
        records = _parse_csv(text)
    else:
        raise DomainError(f"unknown format {format!r}")
    return ScoreSet(tuple(records), provenance)


def validate(score_set: ScoreSet) -> ValidationReport:
    """Summarize a set; record-level invariants already hold by construction."""
    n = len(score_set.records)
    if n == 0:
        raise EmptyInputError("cannot validate an empty score set")
    violations = []
    splits = {r.split for r in score_set.records}
    if len(splits) > 1:
        for i, r in enumerate(score_set.records, start=1):
            if r.split != score_set.records[0].split:
                violations.append((i, f"split {r.split!r} differs from first record"))
    positives = sum(r.label for r in score_set.records)
    return ValidationReport(n, positives / n, tuple(violations))


def filter_split(score_set: ScoreSet, split: str) -> ScoreSet:
    """Keep only records of one split; order preserved."""
    if split not in SPLITS:
        raise DomainError(f"split must be one of {SPLITS}, got {split!r}")
    kept = tuple(r for r in score_set.records if r.split == split)
    if not kept:
        raise EmptyInputError(f"no records with split {split!r}")
    prov = f"{score_set.provenance}[{split}]" if score_set.provenance else split
    return ScoreSet(kept, prov)


def _fmt_score(x: float) -> str:
    # 17 significant digits round-trips any double exactly.
    return format(x, ".17g")


def write_scores(score_set: ScoreSet, format: str = "jsonl") -> bytes:
    """Serialize; parse_scores(write_scores(s)) reproduces s record-for-record."""
    if not score_set.records:
        raise EmptyInputError("refusing to write an empty score set")
    if format == "jsonl":
        lines = []
        for r in score_set.records:
            lines.append(
                "{"
                + f'"id": {json.dumps(r.id)}, "score": {_fmt_score(r.score)}, '
                + f'"label": {r.label}, "run": {r.run}, "subrun": {r.subrun}, '
                + f'"split": "{r.split}"'
                + "}"
            )
        return ("\n".join(lines) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_HEADER)
        for r in score_set.records:
            writer.writerow([r.id, _fmt_score(r.score), r.label, r.run, r.subrun, r.split])
        return buf.getvalue().encode("utf-8")
    raise DomainError(f"unknown format {format!r}")
