import math
import statistics

import pytest

from emcal.binning import bin_scores, ece, reliability_data
from emcal.calibrate import mean_combine, temperature_fit
from emcal.errors import DomainError
from emcal.scores import write_scores
from emcal.synthetic import SyntheticSpec, generate, generate_subruns


def test_spec_validation():
    with pytest.raises(DomainError):
        SyntheticSpec(n=0, seed=1)
    with pytest.raises(DomainError):
        SyntheticSpec(n=10, seed=1, base="weird")
    with pytest.raises(DomainError):
        SyntheticSpec(n=10, seed=1, t_star=0.0)


def test_determinism_byte_identical():
    spec = SyntheticSpec(n=500, seed=77, base="bimodal", t_star=2.0)
    assert write_scores(generate(spec)) == write_scores(generate(spec))


def test_identity_sets_are_nearly_calibrated():
    # sqrt(n) binning carries irreducible sampling noise, so the sub-0.01
    # check runs on a coarse fixed binning where the noise floor is ~0.005
    values = [
        ece(bin_scores(generate(SyntheticSpec(n=50000, seed=seed)), bins=20))
        for seed in range(20)
    ]
    assert statistics.mean(values) < 0.01


def test_identity_sets_pass_diagonal_test():
    for seed in range(5):
        binned = bin_scores(generate(SyntheticSpec(n=50000, seed=seed)))
        for b in binned.bins:
            if b.count is not None and b.count >= 100:
                assert abs(b.positive_rate - b.mean_confidence) < 3 / math.sqrt(b.count)


def test_reliability_points_near_diagonal():
    binned = bin_scores(generate(SyntheticSpec(n=50000, seed=3)), bins=10)
    for conf, rate in reliability_data(binned):
        assert abs(conf - rate) < 0.03


def test_planted_temperature_recoverable():
    for t_star in (0.5, 1.0, 2.0, 2.24, 5.0):
        hits = 0
        for seed in range(5):
            spec = SyntheticSpec(n=50000, seed=seed, t_star=None if t_star == 1.0 else t_star)
            fit = temperature_fit(generate(spec))
            if abs(fit.temperature - t_star) <= 0.1 + 1e-9:
                hits += 1
        assert hits >= 4, f"t_star={t_star} recovered only {hits}/5"


def test_bimodal_pushes_scores_to_extremes():
    scores = generate(SyntheticSpec(n=20000, seed=9, base="bimodal")).scores
    extreme = sum(1 for s in scores if s < 0.2 or s > 0.8) / len(scores)
    uniform_extreme = 0.4
    assert extreme > uniform_extreme + 0.1


def test_subruns_share_labels():
    runs = generate_subruns(SyntheticSpec(n=200, seed=4), k=10, jitter=0.5)
    assert len(runs) == 10
    labels = runs[0].labels
    for r in runs[1:]:
        assert r.labels == labels


def test_subruns_zero_jitter_identity():
    runs = generate_subruns(SyntheticSpec(n=50, seed=6), k=3, jitter=0.0)
    assert runs[0].scores == runs[1].scores == runs[2].scores
    combined = mean_combine(runs)
    assert combined.scores == runs[0].scores


def test_subruns_jitter_varies_scores():
    runs = generate_subruns(SyntheticSpec(n=300, seed=8), k=10, jitter=0.5)
    varying = sum(
        1
        for i in range(300)
        if len({r.scores[i] for r in runs}) > 1
    )
    assert varying > 290


def test_subruns_bad_k():
    with pytest.raises(DomainError):
        generate_subruns(SyntheticSpec(n=10, seed=1), k=0)
