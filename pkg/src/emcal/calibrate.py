"""Score-space calibration methods and their parameter-selection protocols.

Temperature scaling recovers logits with the inverse sigmoid and divides
them by T before re-applying the sigmoid, so hard decisions at 0.5 are
unchanged for every T > 0. Dropout / ensemble combination is a positional
mean over aligned score files; dropout probability selection minimizes
validation ECE subject to not lowering the validation F1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .binning import bin_count_for, bin_scores, ece, f1_score
from .errors import AlignmentError, DomainError, EmptyInputError
from .scores import ScoreSet

# Scores of exactly 0 or 1 have infinite logits, which scaling cannot move;
# clamping this far out preserves ordering at double precision.
_EPS = 1e-12

DEFAULT_T_GRID = tuple(round(0.1 * i, 10) for i in range(1, 101))  # 0.1 .. 10.0
DEFAULT_P_GRID = tuple(round(0.05 * i, 10) for i in range(1, 20))  # 0.05 .. 0.95


def _scale(scores: np.ndarray, temperature: float) -> np.ndarray:
    """sigmoid(logit(p) / T), numerically stable at both tails."""
    p = np.clip(scores, _EPS, 1.0 - _EPS)
    z = np.log(p / (1.0 - p)) / temperature
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


@dataclass(frozen=True)
class TemperatureFit:
    temperature: float
    validation_ece: float
    grid: tuple[float, ...]
    per_grid_ece: tuple[float, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "temperature": self.temperature,
                "validation_ece": self.validation_ece,
                "grid": list(self.grid),
                "per_grid_ece": list(self.per_grid_ece),
            }
        )


@dataclass(frozen=True)
class DropoutCandidate:
    p: float
    validation_ece: float
    validation_f1: float
    admissible: bool


@dataclass(frozen=True)
class DropoutSelection:
    probability: float
    baseline_f1: float
    per_candidate: tuple[DropoutCandidate, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "probability": self.probability,
                "baseline_f1": self.baseline_f1,
                "per_candidate": [
                    {
                        "p": c.p,
                        "validation_ece": c.validation_ece,
                        "validation_f1": c.validation_f1,
                        "admissible": c.admissible,
                    }
                    for c in self.per_candidate
                ],
            }
        )


def temperature_apply(score_set: ScoreSet, temperature: float) -> ScoreSet:
    """Replace each score p with sigmoid(logit(p) / T); labels untouched."""
    if temperature <= 0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    scaled = _scale(np.asarray(score_set.scores), temperature).tolist()
    prov = f"{score_set.provenance}|T={temperature:g}" if score_set.provenance else f"T={temperature:g}"
    return score_set.with_scores(scaled, prov)


def temperature_fit(
    val: ScoreSet, grid: Sequence[float] = DEFAULT_T_GRID, bins: int | None = None
) -> TemperatureFit:
    """Grid-search T minimizing validation ECE; first minimum wins on ties."""
    if len(val) == 0:
        raise EmptyInputError("cannot fit temperature on an empty validation set")
    grid = tuple(grid)
    if not grid:
        raise DomainError("temperature grid must be non-empty")
    if any(t <= 0 for t in grid):
        raise DomainError("temperature grid values must be positive")
    n = len(val)
    n_bins = bin_count_for(n) if bins is None else bins
    if n_bins < 1:
        raise DomainError("bin count must be positive")
    scores = np.asarray(val.scores)
    labels = np.asarray(val.labels, dtype=float)
    per_grid = []
    for t in grid:
        scaled = _scale(scores, t)
        idx = np.minimum((scaled * n_bins).astype(np.int64), n_bins - 1)
        counts = np.bincount(idx, minlength=n_bins)
        conf_sum = np.bincount(idx, weights=scaled, minlength=n_bins)
        pos = np.bincount(idx, weights=labels, minlength=n_bins)
        occupied = counts > 0
        gaps = np.abs(
            pos[occupied] / counts[occupied] - conf_sum[occupied] / counts[occupied]
        )
        per_grid.append(float(np.sum(counts[occupied] / n * gaps)))
    per_grid = tuple(per_grid)
    best = min(range(len(grid)), key=lambda i: (per_grid[i], i))
    return TemperatureFit(grid[best], per_grid[best], grid, per_grid)


def mean_combine(sets: Sequence[ScoreSet], provenance: str = "combined") -> ScoreSet:
    """Positional arithmetic mean over aligned score sets with shared labels."""
    if not sets:
        raise DomainError("need at least one score set to combine")
    first = sets[0]
    n = len(first)
    for s in sets[1:]:
        if len(s) != n:
            raise AlignmentError(f"score sets differ in length ({len(s)} vs {n})")
        for i, (a, b) in enumerate(zip(first.records, s.records)):
            if a.label != b.label:
                raise AlignmentError(f"label disagreement at position {i}")
    k = len(sets)
    means = []
    for i in range(n):
        column = [s.records[i].score for s in sets]
        # identical inputs must combine to the identical value, bit for bit
        means.append(column[0] if all(c == column[0] for c in column) else sum(column) / k)
    return first.with_scores(means, provenance)


def ensemble_combine(runs: Sequence[ScoreSet]) -> ScoreSet:
    """Mean over exactly five independently initialized runs."""
    if len(runs) != 5:
        raise AlignmentError(f"ensemble combination expects 5 runs, got {len(runs)}")
    return mean_combine(runs, provenance="ensemble")


def dropout_select(
    candidates: Mapping[float, ScoreSet],
    baseline: ScoreSet,
    p_grid: Sequence[float] = DEFAULT_P_GRID,
    bins: int | None = None,
) -> DropoutSelection:
    """Pick the admissible dropout probability with the smallest validation ECE.

    A candidate is admissible iff its validation F1 (threshold 0.5) is not
    lower than the no-dropout baseline F1. With no admissible candidate the
    recorded probability is 0.00.
    """
    if not candidates:
        raise DomainError("candidate map must be non-empty")
    unknown = set(candidates) - set(p_grid)
    if unknown:
        raise DomainError(f"candidate p values not on the grid: {sorted(unknown)}")
    baseline_f1 = f1_score(baseline)
    rows = []
    best: DropoutCandidate | None = None
    for p in p_grid:
        if p not in candidates:
            continue
        cand_set = candidates[p]
        if len(cand_set) != len(baseline):
            raise AlignmentError(f"candidate p={p} misaligned with baseline")
        cand = DropoutCandidate(
            p=p,
            validation_ece=ece(bin_scores(cand_set, bins)),
            validation_f1=f1_score(cand_set),
            admissible=f1_score(cand_set) >= baseline_f1,
        )
        rows.append(cand)
        if cand.admissible and (best is None or cand.validation_ece < best.validation_ece):
            best = cand
    probability = best.p if best is not None else 0.0
    return DropoutSelection(probability, baseline_f1, tuple(rows))
