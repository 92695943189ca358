"""Post-hoc confidence-calibration toolkit for binary matchers."""

from .binning import (
    BinnedCalibration,
    bin_count_for,
    bin_scores,
    classify,
    ece,
    f1_score,
    histogram_data,
    mce,
    prf1,
    reliability_data,
    rmsce,
)
from .calibrate import (
    DropoutSelection,
    TemperatureFit,
    dropout_select,
    ensemble_combine,
    mean_combine,
    temperature_apply,
    temperature_fit,
)
from .scores import (
    PredictionRecord,
    ScoreSet,
    filter_split,
    parse_scores,
    validate,
    write_scores,
)
from .stats import aggregate, paired_ttest, pct_change, unpaired_ttest

__all__ = [
    "BinnedCalibration",
    "DropoutSelection",
    "PredictionRecord",
    "ScoreSet",
    "TemperatureFit",
    "aggregate",
    "bin_count_for",
    "bin_scores",
    "classify",
    "dropout_select",
    "ece",
    "ensemble_combine",
    "f1_score",
    "filter_split",
    "histogram_data",
    "mce",
    "mean_combine",
    "paired_ttest",
    "parse_scores",
    "pct_change",
    "prf1",
    "reliability_data",
    "rmsce",
    "temperature_apply",
    "temperature_fit",
    "unpaired_ttest",
    "validate",
    "write_scores",
]

__version__ = "0.1.0"
