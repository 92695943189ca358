"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with `pytest tests/test_acceptance.py -s` to see one line per criterion.
"""

import math
import random
import string
import time
from pathlib import Path

import mpmath
import pytest

from emcal.binning import bin_scores, classify, ece, mce, rmsce
from emcal.calibrate import (
    DEFAULT_T_GRID,
    dropout_select,
    temperature_apply,
    temperature_fit,
)
from emcal.report import render_report, render_reliability_svg
from emcal.scores import ScoreSet
from emcal.serialize import EntityRecord, dirty_corrupt, parse_entry, serialize_entry
from emcal.stats import aggregate, paired_ttest, pct_change, student_t_sf_two_tailed
from emcal.synthetic import SyntheticSpec, generate

from conftest import make_set, oracle_metrics, random_set

DATA = Path(__file__).parent / "data"


def _report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


def test_metric_oracle_equivalence():
    rng = random.Random(12345)
    start = time.time()
    worst = 0.0
    for _ in range(1000):
        n = rng.randint(1, 200)
        scores = [rng.random() for _ in range(n)]
        labels = [rng.randint(0, 1) for _ in range(n)]
        b = bin_scores(make_set(scores, labels))
        o_ece, o_mce, o_rmsce = oracle_metrics(scores, labels, b.bin_count)
        worst = max(
            worst,
            abs(ece(b) - o_ece),
            abs(mce(b) - o_mce),
            abs(rmsce(b) - o_rmsce),
        )
    elapsed = time.time() - start
    _report(
        "metric-oracle equivalence (1000 sets)",
        worst < 1e-12 and elapsed < 10.0,
        f"max |delta| {worst:.2e}, {elapsed:.1f}s",
    )


def test_metric_ordering_invariant():
    rng = random.Random(777)
    violations = 0
    cases = 0
    fixtures = [
        make_set([0.2, 0.4, 0.6, 0.9], [0, 1, 0, 1]),
        make_set([0.5] * 10, [0, 1] * 5),
        make_set([1.0] * 5, [1] * 5),
        make_set([0.9], [0]),
    ]
    for s in fixtures:
        b = bin_scores(s)
        cases += 1
        if not (ece(b) <= rmsce(b) + 1e-15 and rmsce(b) <= mce(b) + 1e-15 and mce(b) <= 1.0):
            violations += 1
    while cases < 10000:
        s = random_set(rng, rng.randint(1, 150))
        b = bin_scores(s)
        cases += 1
        if not (
            0.0 <= ece(b) <= rmsce(b) + 1e-15
            and rmsce(b) <= mce(b) + 1e-15
            and mce(b) <= 1.0
        ):
            violations += 1
    _report(
        "ordering invariant ECE <= RMSCE <= MCE (10000 cases)",
        violations == 0,
        f"{violations} violations",
    )


def test_hand_case():
    b = bin_scores(make_set([0.2, 0.4, 0.6, 0.9], [0, 1, 0, 1]))
    ok = (
        abs(ece(b) - 0.225) < 1e-12
        and abs(mce(b) - 0.25) < 1e-12
        and abs(rmsce(b) - math.sqrt(0.05125)) < 1e-12
    )
    _report("hand case ECE/MCE/RMSCE", ok)


def test_degenerate_uninformative_case():
    b = bin_scores(make_set([0.5] * 100, [0, 1] * 50))
    ok = ece(b) == 0.0 and mce(b) == 0.0 and rmsce(b) == 0.0
    _report("degenerate all-0.5 balanced set yields exactly zero", ok)


def test_temperature_f1_invariance():
    rng = random.Random(31)
    ok = True
    for _ in range(100):
        s = random_set(rng, rng.randint(1, 50))
        base = classify(s)
        for t in DEFAULT_T_GRID:
            if classify(temperature_apply(s, t)) != base:
                ok = False
                break
        if not ok:
            break
    _report("temperature scaling leaves decisions bitwise unchanged", ok)


def test_planted_temperature_recovery():
    t_star = 2.24
    start = time.time()
    hits = 0
    reductions = []
    for seed in range(20):
        val = generate(SyntheticSpec(n=50000, seed=1000 + seed, t_star=t_star))
        fit = temperature_fit(val)
        if abs(fit.temperature - t_star) <= 0.1 + 1e-9:
            hits += 1
        held_out = generate(SyntheticSpec(n=50000, seed=5000 + seed, t_star=t_star))
        before = ece(bin_scores(held_out))
        after = ece(bin_scores(temperature_apply(held_out, fit.temperature)))
        reductions.append(pct_change(before, after))
    elapsed = time.time() - start
    min_reduction = min(reductions)
    ok = hits >= 18 and min_reduction >= 20.0 and elapsed < 60.0
    _report(
        "planted temperature 2.24 recovery",
        ok,
        f"{hits}/20 within ±0.1, min ECE reduction {min_reduction:.1f}%, {elapsed:.1f}s",
    )


def test_percent_change_published_numbers():
    ok = (
        f"{pct_change(0.0193, 0.0147):.2f}" == "23.83"
        and f"{pct_change(0.0410, 0.0377):.2f}" == "8.05"
    )
    _report("published percent reductions 23.83% and 8.05%", ok)


def test_dropout_selection_branches():
    labels = [1, 1, 0, 0]
    baseline = make_set([0.9, 0.9, 0.1, 0.1], labels)
    sharp = make_set([0.99, 0.99, 0.01, 0.01], labels)  # admissible, low ECE
    mild = make_set([0.6, 0.6, 0.4, 0.4], labels)  # admissible, high ECE
    broken = make_set([0.4, 0.6, 0.4, 0.4], labels)  # F1 below baseline

    argmin = dropout_select({0.05: mild, 0.10: sharp}, baseline)
    none_admissible = dropout_select({0.05: broken, 0.10: broken}, baseline)
    singleton = dropout_select({0.05: broken, 0.10: mild, 0.15: broken}, baseline)
    ok = (
        argmin.probability == 0.10
        and none_admissible.probability == 0.0
        and singleton.probability == 0.10
    )
    _report("dropout selection exercises all three branches", ok)


def test_statistics_oracle():
    hand = paired_ttest([0.1, 0.2, 0.3], [0.2, 0.3, 0.5])
    hand_ok = (
        abs(abs(hand.statistic) - 4.0) < 1e-9
        and hand.degrees_of_freedom == 2
        and abs(hand.p_value - 0.0572) <= 1e-4
    )
    mpmath.mp.dps = 40
    worst = 0.0
    for df in range(2, 9):
        for i in range(1, 101):
            t = i / 10.0
            x = mpmath.mpf(df) / (df + mpmath.mpf(t) ** 2)
            want = float(
                mpmath.betainc(mpmath.mpf(df) / 2, mpmath.mpf(1) / 2, 0, x, regularized=True)
            )
            worst = max(worst, abs(student_t_sf_two_tailed(t, df) - want))
    _report(
        "t statistics oracle (hand case + incomplete-beta reference)",
        hand_ok and worst < 1e-9,
        f"max p deviation {worst:.2e}",
    )


def test_serializer_acceptance():
    rng = random.Random(606)
    alphabet = string.ascii_letters + string.digits + " []\\-_."
    roundtrip_failures = 0
    multiset_failures = 0
    for i in range(1000):
        attrs = tuple(
            (
                "".join(rng.choices(alphabet, k=rng.randint(1, 8))),
                "".join(rng.choices(alphabet, k=rng.randint(0, 12))),
            )
            for _ in range(rng.randint(1, 5))
        )
        record = EntityRecord(attrs)
        if parse_entry(serialize_entry(record)) != record:
            roundtrip_failures += 1
        if len(attrs) >= 2:
            corrupted = dirty_corrupt(record, seed=i)
            before = sorted(t for v in record.values for t in v.split())
            after = sorted(t for v in corrupted.values for t in v.split())
            if before != after:
                multiset_failures += 1

    record = EntityRecord(
        (
            ("title", "Sony WH-1000XM4 Wireless Headphones"),
            ("brand", "Sony"),
            ("price", "348.00"),
            ("category", "Audio"),
        )
    )
    lines = [
        serialize_entry(dirty_corrupt(record, seed=seed, move_probability=1.0))
        for seed in range(8)
    ] + [serialize_entry(dirty_corrupt(record, seed=seed)) for seed in range(8)]
    golden_ok = "\n".join(lines) + "\n" == (DATA / "dirty_golden.txt").read_text()

    ok = roundtrip_failures == 0 and multiset_failures == 0 and golden_ok
    _report(
        "serializer round-trip, golden corruption, token multiset",
        ok,
        f"{roundtrip_failures} roundtrip / {multiset_failures} multiset failures, "
        f"golden {'ok' if golden_ok else 'MISMATCH'}",
    )


def test_rendering_determinism():
    s = generate(SyntheticSpec(n=500, seed=42, t_star=2.0))
    b = bin_scores(s)
    points = [(bn.mean_confidence, bn.positive_rate) for bn in b.bins if bn.count > 0]
    metrics = {"ece": ece(b), "mce": mce(b), "rmsce": rmsce(b)}
    svg_ok = render_reliability_svg(points, metrics) == render_reliability_svg(points, metrics)

    from emcal.report import ReportRow

    rows = [
        ReportRow(
            "demo",
            "baseline",
            aggregate([0.02, 0.021, 0.019]),
            aggregate([0.9, 0.91, 0.92]),
            aggregate([0.05, 0.06, 0.04]),
            aggregate([0.03, 0.031, 0.029]),
        )
    ]
    csv_ok = render_report(rows) == render_report(rows)
    _report("rendering determinism (SVG and CSV byte-identical)", svg_ok and csv_ok)
