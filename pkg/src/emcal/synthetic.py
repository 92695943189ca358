"""Synthetic score sets with known ground-truth calibration.

Each record draws a latent true probability q, a label ~ Bernoulli(q),
and reports either q itself (a perfectly calibrated set) or a
temperature-distorted score sigmoid(logit(q) * t_star). Fitting
temperature scaling to a distorted set should recover t_star. A bimodal
base pushes q toward 0 and 1, mimicking a confident matcher's scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .rng import SplitMix64
from .scores import PredictionRecord, ScoreSet

_EPS = 1e-12


def _logit(p: float) -> float:
    p = min(max(p, _EPS), 1.0 - _EPS)
    return math.log(p / (1.0 - p))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    seed: int
    base: str = "uniform"  # "uniform" | "bimodal"
    bimodal_alpha: float = 3.0  # >1 pushes latent q toward 0 and 1
    t_star: Optional[float] = None  # None = identity (calibrated) scores
    split: str = "test"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be positive")
        if self.base not in ("uniform", "bimodal"):
            raise DomainError(f"unknown base distribution {self.base!r}")
        if self.bimodal_alpha <= 0:
            raise DomainError("bimodal alpha must be positive")
        if self.t_star is not None and self.t_star <= 0:
            raise DomainError("t_star must be positive")


def _draw_q(rng: SplitMix64, spec: SyntheticSpec) -> float:
    u = rng.uniform()
    if spec.base == "uniform":
        return u
    return _sigmoid(spec.bimodal_alpha * _logit(u))


def generate(spec: SyntheticSpec) -> ScoreSet:
    """Deterministic per (spec, seed); labels are Bernoulli in the latent q."""
    rng = SplitMix64(spec.seed)
    records = []
    for i in range(spec.n):
        q = _draw_q(rng, spec)
        label = 1 if rng.uniform() < q else 0
        score = q if spec.t_star is None else _sigmoid(_logit(q) * spec.t_star)
        records.append(
            PredictionRecord(id=f"s{i}", score=score, label=label, split=spec.split)
        )
    tag = "identity" if spec.t_star is None else f"temperature:{spec.t_star:g}"
    return ScoreSet(tuple(records), provenance=f"synthetic[{spec.base},{tag}]")


def generate_subruns(spec: SyntheticSpec, k: int, jitter: float = 0.0) -> list[ScoreSet]:
    """k aligned sets sharing labels; scores jittered in logit space."""
    if k < 1:
        raise DomainError("subrun count must be positive")
    if jitter < 0:
        raise DomainError("jitter must be non-negative")
    base = generate(spec)
    if jitter == 0.0:
        return [
            ScoreSet(
                tuple(
                    PredictionRecord(r.id, r.score, r.label, r.run, j, r.split)
                    for r in base.records
                ),
                provenance=f"{base.provenance}[subrun {j}]",
            )
            for j in range(k)
        ]
    noise_rng = SplitMix64(spec.seed ^ 0xD1F7)
    out = []
    for j in range(k):
        records = []
        for r in base.records:
            z = _logit(r.score) + jitter * noise_rng.gauss()
            records.append(PredictionRecord(r.id, _sigmoid(z), r.label, r.run, j, r.split))
        out.append(ScoreSet(tuple(records), provenance=f"{base.provenance}[subrun {j}]"))
    return out
