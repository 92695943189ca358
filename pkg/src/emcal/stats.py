"""Run aggregation, percent-change arithmetic, and t-tests at alpha = 0.05.

The Student t CDF is computed through the regularized incomplete beta
function (continued-fraction evaluation, relative tolerance 1e-12), so
no external statistics dependency is needed and every p-value can be
checked against an arbitrary-precision oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import AlignmentError, DomainError, InsufficientDataError

ALPHA = 0.05


@dataclass(frozen=True)
class RunAggregate:
    values: tuple[float, ...]
    mean: float
    std: float  # sample standard deviation, n-1 denominator


@dataclass(frozen=True)
class TTestResult:
    statistic: float
    degrees_of_freedom: float
    p_value: float
    significant: bool
    direction: str  # "increase" | "decrease" | "none", sign of mean(a) - mean(b)
    degenerate: bool = False  # zero-variance input, p pinned at 0 or 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "statistic": self.statistic,
                "degrees_of_freedom": self.degrees_of_freedom,
                "p_value": self.p_value,
                "significant": self.significant,
                "direction": self.direction,
                "degenerate": self.degenerate,
            }
        )


def aggregate(values: Sequence[float]) -> RunAggregate:
    """Mean and sample std over per-run values; needs at least two runs."""
    values = tuple(float(v) for v in values)
    n = len(values)
    if n < 2:
        raise InsufficientDataError("aggregation needs at least 2 values")
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return RunAggregate(values, mean, math.sqrt(var))


def pct_change(baseline: float, treated: float) -> float:
    """Percent reduction relative to baseline; positive means improvement."""
    if baseline == 0:
        raise DomainError("percent change undefined for zero baseline")
    return 100.0 * (baseline - treated) / baseline


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 500):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf_two_tailed(t: float, df: float) -> float:
    """Two-tailed p-value P(|T_df| >= |t|)."""
    if df <= 0:
        raise InsufficientDataError("degrees of freedom must be positive")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def _direction(mean_diff: float) -> str:
    if mean_diff > 0:
        return "increase"
    if mean_diff < 0:
        return "decrease"
    return "none"


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-tailed paired t-test on positionally matched per-run values."""
    if len(a) != len(b):
        raise AlignmentError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise InsufficientDataError("paired t-test needs at least 2 pairs")
    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    mean_d = sum(diffs) / n
    var_d = sum((d - mean_d) ** 2 for d in diffs) / (n - 1)
    df = n - 1
    if var_d == 0.0:
        if mean_d == 0.0:
            return TTestResult(0.0, df, 1.0, False, "none", degenerate=True)
        stat = math.copysign(math.inf, mean_d)
        return TTestResult(stat, df, 0.0, True, _direction(mean_d), degenerate=True)
    stat = mean_d / math.sqrt(var_d / n)
    p = student_t_sf_two_tailed(stat, df)
    return TTestResult(stat, df, p, p < ALPHA, _direction(mean_d))


def unpaired_ttest(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-tailed Welch t-test (unequal variances, Welch-Satterthwaite df)."""
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise InsufficientDataError("unpaired t-test needs at least 2 values per group")
    mean_a = sum(a) / na
    mean_b = sum(b) / nb
    var_a = sum((x - mean_a) ** 2 for x in a) / (na - 1)
    var_b = sum((x - mean_b) ** 2 for x in b) / (nb - 1)
    diff = mean_a - mean_b
    se2 = var_a / na + var_b / nb
    if se2 == 0.0:
        if diff == 0.0:
            return TTestResult(0.0, na + nb - 2, 1.0, False, "none", degenerate=True)
        stat = math.copysign(math.inf, diff)
        return TTestResult(stat, na + nb - 2, 0.0, True, _direction(diff), degenerate=True)
    stat = diff / math.sqrt(se2)
    df = se2 * se2 / (
        (var_a / na) ** 2 / (na - 1) + (var_b / nb) ** 2 / (nb - 1)
    )
    p = student_t_sf_two_tailed(stat, df)
    return TTestResult(stat, df, p, p < ALPHA, _direction(diff))
