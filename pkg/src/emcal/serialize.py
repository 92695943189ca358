"""Entity-record serialization and the dirty attribute-shuffle corruption.

Records become marker-delimited text: "[COL] name [VAL] value ..." per
attribute, pairs joined with "[SEP]". Literal backslashes and "[" in raw
data are backslash-escaped, as are value/name boundary spaces, so the
grammar parses back losslessly and golden files are bit-exact.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DomainError, ParseError
from .rng import SplitMix64

_MARKERS = ("[COL]", "[VAL]", "[SEP]")


@dataclass(frozen=True)
class EntityRecord:
    """Ordered (attribute name, value) pairs; duplicates and order significant."""

    attributes: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for name, _ in self.attributes:
            if not name:
                raise DomainError("attribute names must be non-empty")

    @property
    def values(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.attributes)


@dataclass(frozen=True)
class EntityPair:
    left: EntityRecord
    right: EntityRecord
    label: Optional[int] = None

    def __post_init__(self):
        if self.label is not None and self.label not in (0, 1):
            raise DomainError(f"pair label must be 0 or 1, got {self.label!r}")


def _escape(text: str) -> str:
    out = text.replace("\\", "\\\\").replace("[", "\\[")
    if out.startswith(" "):
        out = "\\" + out
    if out.endswith(" "):
        # escape the trailing space unless a backslash already covers it
        backslashes = 0
        i = len(out) - 2
        while i >= 0 and out[i] == "\\":
            backslashes += 1
            i -= 1
        if backslashes % 2 == 0:
            out = out[:-1] + "\\ "
    return out


def _unescape(text: str, offset: int = 0) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text):
                raise ParseError(f"dangling escape at offset {offset + i}")
            out.append(text[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def serialize_entry(record: EntityRecord) -> str:
    parts = []
    for name, value in record.attributes:
        piece = "[COL] " + _escape(name) + " [VAL]"
        if value != "":
            piece += " " + _escape(value)
        parts.append(piece)
    return " ".join(parts)


def serialize_pair(pair: EntityPair) -> str:
    return serialize_entry(pair.left) + " [SEP] " + serialize_entry(pair.right)


def _scan_markers(text: str) -> list[tuple[int, str]]:
    """Positions of unescaped markers; unescaped '[' elsewhere is an error."""
    found = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "[":
            for marker in _MARKERS:
                if text.startswith(marker, i):
                    found.append((i, marker))
                    i += len(marker)
                    break
            else:
                raise ParseError(f"unescaped '[' at offset {i}")
            continue
        i += 1
    return found


def parse_entry(text: str) -> EntityRecord:
    """Inverse of serialize_entry; raises ParseError with an offset."""
    markers = _scan_markers(text)
    if any(m == "[SEP]" for _, m in markers):
        raise ParseError("unexpected [SEP] inside a single entry")
    if not markers or markers[0] != (0, "[COL]"):
        raise ParseError("entry must start with [COL] at offset 0")
    expected = "[COL]"
    for _, marker in markers:
        if marker != expected:
            raise ParseError(f"expected {expected}, found {marker}")
        expected = "[VAL]" if expected == "[COL]" else "[COL]"
    if expected == "[VAL]":
        raise ParseError("entry ends with a [COL] missing its [VAL]")

    attributes = []
    for idx in range(0, len(markers), 2):
        col_pos = markers[idx][0]
        val_pos = markers[idx + 1][0]
        name_raw = text[col_pos + 5 : val_pos]
        if len(name_raw) < 2 or not name_raw.startswith(" ") or not name_raw.endswith(" "):
            raise ParseError(f"malformed name field at offset {col_pos + 5}")
        name = _unescape(name_raw[1:-1], col_pos + 6)
        if not name:
            raise ParseError(f"empty attribute name at offset {col_pos + 5}")
        end = markers[idx + 2][0] if idx + 2 < len(markers) else len(text)
        value_raw = text[val_pos + 5 : end]
        if idx + 2 < len(markers):
            if value_raw == " ":
                value = ""
            elif value_raw.startswith(" ") and value_raw.endswith(" ") and len(value_raw) >= 3:
                value = _unescape(value_raw[1:-1], val_pos + 6)
            else:
                raise ParseError(f"malformed value field at offset {val_pos + 5}")
        else:
            if value_raw == "":
                value = ""
            elif value_raw.startswith(" "):
                value = _unescape(value_raw[1:], val_pos + 6)
            else:
                raise ParseError(f"malformed value field at offset {val_pos + 5}")
        attributes.append((name, value))
    return EntityRecord(tuple(attributes))


def parse_pair(text: str, label: Optional[int] = None) -> EntityPair:
    seps = [pos for pos, m in _scan_markers(text) if m == "[SEP]"]
    if len(seps) != 1:
        raise ParseError(f"expected exactly one [SEP], found {len(seps)}")
    pos = seps[0]
    if not text[:pos].endswith(" ") or not text.startswith(" ", pos + 5):
        raise ParseError(f"[SEP] at offset {pos} must be space-delimited")
    return EntityPair(parse_entry(text[: pos - 1]), parse_entry(text[pos + 6 :]), label)


def dirty_corrupt(
    record: EntityRecord, seed: int, move_probability: float = 0.5
) -> EntityRecord:
    """Move each value, with the given probability, to another attribute.

    A moved value is appended (space-joined) after the target attribute's
    remaining content and its own slot is emptied. Attribute names and the
    multiset of value tokens are unchanged. Deterministic per seed.
    """
    if not 0.0 <= move_probability <= 1.0:
        raise DomainError(f"move probability {move_probability} outside [0, 1]")
    n = len(record.attributes)
    if n < 2:
        warnings.warn("dirty corruption is a no-op on records with fewer than 2 attributes")
        return record
    rng = SplitMix64(seed)
    moves: list[Optional[int]] = []
    for i in range(n):
        if rng.uniform() < move_probability:
            j = rng.randint(n - 1)
            moves.append(j if j < i else j + 1)
        else:
            moves.append(None)
    originals = record.values
    new_values = ["" if moves[i] is not None else originals[i] for i in range(n)]
    for i, target in enumerate(moves):
        if target is None or originals[i] == "":
            continue
        if new_values[target]:
            new_values[target] = new_values[target] + " " + originals[i]
        else:
            new_values[target] = originals[i]
    return EntityRecord(
        tuple((name, new_values[i]) for i, (name, _) in enumerate(record.attributes))
    )


def read_entity_table(text: str) -> dict[str, EntityRecord]:
    """CSV with an 'id' first column; remaining columns become attributes."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing CSV header", 1) from None
    if not header or header[0] != "id":
        raise ParseError("first column must be 'id'", 1)
    entities: dict[str, EntityRecord] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, got {len(row)}", lineno)
        entities[row[0]] = EntityRecord(tuple(zip(header[1:], row[1:])))
    return entities


def read_pairs_table(text: str) -> list[tuple[str, str, int]]:
    """CSV with header left_id,right_id,label."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing CSV header", 1) from None
    if header != ["left_id", "right_id", "label"]:
        raise ParseError("header must be left_id,right_id,label", 1)
    pairs = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 cells, got {len(row)}", lineno)
        try:
            label = int(row[2])
        except ValueError:
            raise ParseError(f"label {row[2]!r} is not an integer", lineno) from None
        if label not in (0, 1):
            raise ParseError(f"label must be 0 or 1, got {label}", lineno)
        pairs.append((row[0], row[1], label))
    return pairs


def serialize_corpus(
    left: dict[str, EntityRecord],
    right: dict[str, EntityRecord],
    pairs: Sequence[tuple[str, str, int]],
    dirty_seed: Optional[int] = None,
) -> tuple[list[str], list[tuple[str, int]]]:
    """Serialize candidate pairs; returns (text lines, (pair id, label) sidecar).

    With dirty_seed set, both sides of every pair are corrupted with a
    per-record seed derived deterministically from the pair index.
    """
    lines = []
    sidecar = []
    for idx, (lid, rid, label) in enumerate(pairs):
        if lid not in left:
            raise DomainError(f"unknown left id {lid!r}")
        if rid not in right:
            raise DomainError(f"unknown right id {rid!r}")
        lrec, rrec = left[lid], right[rid]
        if dirty_seed is not None:
            lrec = dirty_corrupt(lrec, seed=dirty_seed + 2 * idx)
            rrec = dirty_corrupt(rrec, seed=dirty_seed + 2 * idx + 1)
        lines.append(serialize_pair(EntityPair(lrec, rrec, label)))
        sidecar.append((f"{lid}|{rid}", label))
    return lines, sidecar
