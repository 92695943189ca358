"""Shared fixtures and independent metric oracles.

The oracle functions recompute every calibration metric with a direct
loop over records and bins, touching none of the package's binning
machinery, so they stay independent of the code paths they check.
"""

from __future__ import annotations

import math
import random

from emcal.scores import PredictionRecord, ScoreSet


def make_set(scores, labels, provenance: str = "test", split: str = "test") -> ScoreSet:
    records = tuple(
        PredictionRecord(id=f"r{i}", score=float(s), label=int(l), split=split)
        for i, (s, l) in enumerate(zip(scores, labels))
    )
    return ScoreSet(records, provenance)


def random_set(rng: random.Random, n: int) -> ScoreSet:
    scores = [rng.random() for _ in range(n)]
    labels = [rng.randint(0, 1) for _ in range(n)]
    return make_set(scores, labels)


def oracle_metrics(scores, labels, bins: int) -> tuple[float, float, float]:
    """Brute-force ECE/MCE/RMSCE straight from the definitions."""
    n = len(scores)
    assert n > 0
    ece_sum = 0.0
    sq_sum = 0.0
    worst = 0.0
    for k in range(bins):
        members = [
            i for i, s in enumerate(scores) if min(int(s * bins), bins - 1) == k
        ]
        if not members:
            continue
        conf = sum(scores[i] for i in members) / len(members)
        rate = sum(labels[i] for i in members) / len(members)
        gap = abs(rate - conf)
        ece_sum += len(members) / n * gap
        sq_sum += len(members) / n * gap * gap
        worst = max(worst, gap)
    return ece_sum, worst, math.sqrt(sq_sum)
