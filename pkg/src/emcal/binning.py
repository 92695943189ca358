"""Equal-width confidence binning and the metrics built on it.

ECE / MCE / RMSCE follow the standard binned definitions over the
positive-class confidence: per bin, compare the mean confidence with the
empirical positive rate; weight by bin occupancy (ECE, RMSCE) or take
the worst gap (MCE). Empty bins carry no weight and are skipped.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import AlignmentError, DomainError, EmptyInputError
from .scores import ScoreSet


@dataclass(frozen=True)
class Bin:
    lower: float
    upper: float
    count: int
    mean_confidence: float | None  # None iff count == 0
    positive_rate: float | None


@dataclass(frozen=True)
class BinnedCalibration:
    bin_count: int
    bins: tuple[Bin, ...]

    @property
    def total(self) -> int:
        return sum(b.count for b in self.bins)


@dataclass(frozen=True)
class ClassificationCounts:
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class PRF1:
    precision: float
    recall: float
    f1: float
    degenerate: bool = False  # a zero denominator was reported as 0


def bin_count_for(n: int) -> int:
    """Number of equal-width bins for a dataset of size n: floor(sqrt(n))."""
    if n < 1:
        raise EmptyInputError("bin count undefined for empty data")
    return max(1, math.isqrt(n))


def _bin_index(score: float, bins: int) -> int:
    # score 1.0 is clamped into the last (closed) bin
    return min(int(score * bins), bins - 1)


def bin_scores(score_set: ScoreSet, bins: int | None = None) -> BinnedCalibration:
    """Partition [0,1] into equal-width bins and summarize each."""
    n = len(score_set)
    if n == 0:
        raise EmptyInputError("cannot bin an empty score set")
    if bins is None:
        bins = bin_count_for(n)
    if bins < 1:
        raise DomainError("bin count must be positive")
    counts = [0] * bins
    score_sums = [0.0] * bins
    positive = [0] * bins
    for r in score_set.records:
        i = _bin_index(r.score, bins)
        counts[i] += 1
        score_sums[i] += r.score
        positive[i] += r.label
    out = []
    for i in range(bins):
        lower, upper = i / bins, (i + 1) / bins
        if counts[i] == 0:
            out.append(Bin(lower, upper, 0, None, None))
        else:
            out.append(
                Bin(lower, upper, counts[i], score_sums[i] / counts[i], positive[i] / counts[i])
            )
    return BinnedCalibration(bins, tuple(out))


def ece(binned: BinnedCalibration) -> float:
    """Occupancy-weighted mean absolute confidence/positive-rate gap."""
    n = binned.total
    if n == 0:
        raise EmptyInputError("no records behind this binning")
    return sum(
        (b.count / n) * abs(b.positive_rate - b.mean_confidence)
        for b in binned.bins
        if b.count > 0
    )


def mce(binned: BinnedCalibration) -> float:
    """Largest per-bin gap over non-empty bins."""
    if binned.total == 0:
        raise EmptyInputError("no records behind this binning")
    return max(abs(b.positive_rate - b.mean_confidence) for b in binned.bins if b.count > 0)


def rmsce(binned: BinnedCalibration) -> float:
    """Occupancy-weighted root-mean-square gap; emphasizes large errors."""
    n = binned.total
    if n == 0:
        raise EmptyInputError("no records behind this binning")
    return math.sqrt(
        sum(
            (b.count / n) * (b.positive_rate - b.mean_confidence) ** 2
            for b in binned.bins
            if b.count > 0
        )
    )


def classify(score_set: ScoreSet, threshold: float = 0.5) -> tuple[int, ...]:
    """Hard labels: 1 iff score >= threshold (ties predict the positive class)."""
    if not 0.0 <= threshold <= 1.0:
        raise DomainError(f"threshold {threshold} outside [0, 1]")
    return tuple(1 if r.score >= threshold else 0 for r in score_set.records)


def counts(pred, truth) -> ClassificationCounts:
    if len(pred) != len(truth):
        raise AlignmentError("prediction and truth vectors differ in length")
    tp = fp = fn = tn = 0
    for p, t in zip(pred, truth):
        if p == 1 and t == 1:
            tp += 1
        elif p == 1:
            fp += 1
        elif t == 1:
            fn += 1
        else:
            tn += 1
    return ClassificationCounts(tp, fp, fn, tn)


def prf1(pred, truth) -> PRF1:
    """Precision/recall/F1; zero denominators yield 0 with a degenerate flag."""
    c = counts(pred, truth)
    degenerate = False
    if c.tp + c.fp == 0:
        precision, degenerate = 0.0, True
    else:
        precision = c.tp / (c.tp + c.fp)
    if c.tp + c.fn == 0:
        recall, degenerate = 0.0, True
    else:
        recall = c.tp / (c.tp + c.fn)
    if precision + recall == 0.0:
        return PRF1(precision, recall, 0.0, True)
    return PRF1(precision, recall, 2 * precision * recall / (precision + recall), degenerate)


def f1_score(score_set: ScoreSet, threshold: float = 0.5) -> float:
    return prf1(classify(score_set, threshold), score_set.labels).f1


@dataclass(frozen=True)
class HistogramData:
    """Per-bin counts split by correctness at the decision threshold."""

    binned: BinnedCalibration
    correct: tuple[int, ...]
    incorrect: tuple[int, ...]

    @property
    def correct_pct(self) -> tuple[float, ...]:
        n = self.binned.total
        return tuple(100.0 * c / n for c in self.correct)

    @property
    def incorrect_pct(self) -> tuple[float, ...]:
        n = self.binned.total
        return tuple(100.0 * c / n for c in self.incorrect)


def histogram_data(
    score_set: ScoreSet, bins: int | None = None, threshold: float = 0.5
) -> HistogramData:
    """Correct/incorrect occupancy per confidence bin."""
    binned = bin_scores(score_set, bins)
    pred = classify(score_set, threshold)
    correct = [0] * binned.bin_count
    incorrect = [0] * binned.bin_count
    for r, p in zip(score_set.records, pred):
        i = _bin_index(r.score, binned.bin_count)
        if p == r.label:
            correct[i] += 1
        else:
            incorrect[i] += 1
    return HistogramData(binned, tuple(correct), tuple(incorrect))


def reliability_data(binned: BinnedCalibration) -> tuple[tuple[float, float], ...]:
    """(mean confidence, positive rate) per non-empty bin; empty bins omitted."""
    return tuple(
        (b.mean_confidence, b.positive_rate) for b in binned.bins if b.count > 0
    )


def reliability_csv(binned: BinnedCalibration) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_lower", "bin_upper", "count", "mean_confidence", "positive_rate"])
    for b in binned.bins:
        writer.writerow(
            [
                format(b.lower, ".17g"),
                format(b.upper, ".17g"),
                b.count,
                "" if b.mean_confidence is None else format(b.mean_confidence, ".17g"),
                "" if b.positive_rate is None else format(b.positive_rate, ".17g"),
            ]
        )
    return buf.getvalue()


def histogram_csv(hist: HistogramData) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_lower", "bin_upper", "count", "correct_pct", "incorrect_pct"])
    for b, cp, ip in zip(hist.binned.bins, hist.correct_pct, hist.incorrect_pct):
        writer.writerow(
            [
                format(b.lower, ".17g"),
                format(b.upper, ".17g"),
                b.count,
                format(cp, ".17g"),
                format(ip, ".17g"),
            ]
        )
    return buf.getvalue()
