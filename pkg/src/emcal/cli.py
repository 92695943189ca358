"""Command-line surface.

Exit codes: 0 success, 2 input/domain error, 3 alignment error.

The `report` command reads a directory of score files named
``<dataset>__<method>__run<K>.jsonl`` with method one of baseline,
temperature, dropout, ensemble; temperature/dropout are compared to the
baseline with a paired t-test over run-matched metric values, ensemble
with an unpaired (Welch) test.
"""

from __future__ import annotations

import argparse
import re
import sys
from collections import defaultdict
from pathlib import Path

from . import binning, calibrate, report, serialize, stats, synthetic
from .errors import AlignmentError, DomainError, EmptyInputError, InputError, ParseError
from .scores import ScoreSet, parse_scores, write_scores

_METRIC_FNS = {
    "ece": lambda s, bins=None: binning.ece(binning.bin_scores(s, bins)),
    "mce": lambda s, bins=None: binning.mce(binning.bin_scores(s, bins)),
    "rmsce": lambda s, bins=None: binning.rmsce(binning.bin_scores(s, bins)),
    "f1": lambda s, bins=None: binning.f1_score(s),
}


def _load(path: str, fmt: str = "jsonl") -> ScoreSet:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {path}")
    return parse_scores(p.read_bytes(), fmt, provenance=p.name)


def _cmd_metrics(args) -> int:
    score_set = _load(args.scores, args.format)
    binned = binning.bin_scores(score_set, args.bins)
    quality = binning.prf1(binning.classify(score_set), score_set.labels)
    print(f"records   {len(score_set)}")
    print(f"bins      {binned.bin_count}")
    print(f"ece       {binning.ece(binned):.6f}")
    print(f"mce       {binning.mce(binned):.6f}")
    print(f"rmsce     {binning.rmsce(binned):.6f}")
    print(f"precision {100 * quality.precision:.2f}")
    print(f"recall    {100 * quality.recall:.2f}")
    print(f"f1        {100 * quality.f1:.2f}")
    if quality.degenerate:
        print("warning: degenerate precision/recall (zero denominator reported as 0)")
    if args.out_csv:
        Path(args.out_csv).write_text(binning.reliability_csv(binned))
    return 0


def _cmd_calibrate_temperature(args) -> int:
    val = _load(args.val)
    test = _load(args.test)
    steps = round((args.grid_stop - args.grid_start) / args.grid_step)
    grid = [round(args.grid_start + i * args.grid_step, 10) for i in range(steps + 1)]
    fit = calibrate.temperature_fit(val, grid)
    scaled = calibrate.temperature_apply(test, fit.temperature)
    before = binning.ece(binning.bin_scores(test))
    after = binning.ece(binning.bin_scores(scaled))
    print(f"temperature  {fit.temperature:g}")
    print(f"val ece      {fit.validation_ece:.6f}")
    print(f"test ece     {before:.6f} -> {after:.6f}")
    Path(args.out).write_text(fit.to_json() + "\n")
    return 0


def _cmd_combine(args) -> int:
    sets = [_load(p) for p in args.inputs]
    combined = calibrate.mean_combine(sets)
    Path(args.out).write_bytes(write_scores(combined))
    print(f"combined {len(sets)} files, {len(combined)} records")
    return 0


_CANDIDATE_RE = re.compile(r"^p=(0\.\d+)\.jsonl$")


def _cmd_select_dropout(args) -> int:
    baseline = _load(args.baseline)
    candidates = {}
    cdir = Path(args.candidates)
    if not cdir.is_dir():
        raise InputError(f"not a directory: {args.candidates}")
    for path in sorted(cdir.iterdir()):
        m = _CANDIDATE_RE.match(path.name)
        if m:
            candidates[float(m.group(1))] = _load(str(path))
    selection = calibrate.dropout_select(candidates, baseline)
    print(f"dropout p    {selection.probability:g}")
    print(f"baseline f1  {100 * selection.baseline_f1:.2f}")
    Path(args.out).write_text(selection.to_json() + "\n")
    return 0


def _per_run_metric(score_set: ScoreSet, metric: str) -> dict[int, float]:
    by_run: dict[int, list] = defaultdict(list)
    for r in score_set.records:
        by_run[r.run].append(r)
    return {
        run: _METRIC_FNS[metric](ScoreSet(tuple(recs)))
        for run, recs in sorted(by_run.items())
    }


def _cmd_ttest(args) -> int:
    a = _per_run_metric(_load(args.a), args.metric)
    b = _per_run_metric(_load(args.b), args.metric)
    if args.paired:
        if sorted(a) != sorted(b):
            raise AlignmentError("paired test requires matching run ids in both files")
        result = stats.paired_ttest(
            [a[k] for k in sorted(a)], [b[k] for k in sorted(b)]
        )
    else:
        result = stats.unpaired_ttest(list(a.values()), list(b.values()))
    print(result.to_json())
    return 0


_RUN_FILE_RE = re.compile(r"^(?P<dataset>.+)__(?P<method>[a-z]+)__run(?P<run>\d+)\.jsonl$")


def _cmd_report(args) -> int:
    runs_dir = Path(args.runs)
    if not runs_dir.is_dir():
        raise InputError(f"not a directory: {args.runs}")
    # dataset -> method -> run -> metric values
    data: dict[str, dict[str, dict[int, dict[str, float]]]] = defaultdict(
        lambda: defaultdict(dict)
    )
    for path in sorted(runs_dir.iterdir()):
        m = _RUN_FILE_RE.match(path.name)
        if not m:
            continue
        if m.group("method") not in report.METHODS:
            raise InputError(f"unknown method in file name {path.name!r}")
        score_set = _load(str(path))
        data[m.group("dataset")][m.group("method")][int(m.group("run"))] = {
            metric: _METRIC_FNS[metric](score_set) for metric in report.METRICS
        }
    if not data:
        raise EmptyInputError(f"no run files found in {args.runs}")

    rows = []
    for dataset in sorted(data):
        methods = data[dataset]
        if "baseline" not in methods:
            raise DomainError(f"missing baseline runs for dataset {dataset!r}")
        base_runs = methods["baseline"]

        def aggregates(run_metrics):
            return {
                metric: stats.aggregate([run_metrics[k][metric] for k in sorted(run_metrics)])
                for metric in report.METRICS
            }

        base_aggs = aggregates(base_runs)
        rows.append(report.ReportRow(dataset, "baseline", **base_aggs))
        for method in ("temperature", "dropout", "ensemble"):
            if method not in methods:
                continue
            run_metrics = methods[method]
            aggs = aggregates(run_metrics)
            comparisons = {}
            for metric in report.METRICS:
                treated = [run_metrics[k][metric] for k in sorted(run_metrics)]
                base = [base_runs[k][metric] for k in sorted(base_runs)]
                if method == "ensemble":
                    result = stats.unpaired_ttest(treated, base)
                else:
                    if sorted(run_metrics) != sorted(base_runs):
                        raise AlignmentError(
                            f"{dataset}/{method}: run ids do not match baseline runs"
                        )
                    result = stats.paired_ttest(treated, base)
                comparisons[metric] = report.compare(
                    metric, base_aggs[metric].mean, aggs[metric].mean, result.significant
                )
            rows.append(report.ReportRow(dataset, method, vs_baseline=comparisons, **aggs))
    text, csv_text = report.render_report(rows)
    Path(args.out).write_text(text)
    Path(args.out_csv).write_text(csv_text)
    print(text, end="")
    return 0


def _cmd_plot(args) -> int:
    score_set = _load(args.scores)
    if args.kind == "reliability":
        binned = binning.bin_scores(score_set)
        svg = report.render_reliability_svg(
            binning.reliability_data(binned),
            {
                "ece": binning.ece(binned),
                "mce": binning.mce(binned),
                "rmsce": binning.rmsce(binned),
            },
        )
    else:
        hist = binning.histogram_data(score_set)
        svg = report.render_histogram_svg(hist.correct_pct, hist.incorrect_pct, args.log)
    Path(args.out).write_bytes(svg)
    return 0


def _cmd_simulate(args) -> int:
    distortion = args.distortion
    if distortion == "identity":
        t_star = None
    elif distortion.startswith("temperature:"):
        try:
            t_star = float(distortion.split(":", 1)[1])
        except ValueError:
            raise DomainError(f"bad distortion {distortion!r}") from None
    else:
        raise DomainError(f"bad distortion {distortion!r}")
    spec = synthetic.SyntheticSpec(n=args.n, seed=args.seed, base=args.base, t_star=t_star)
    Path(args.out).write_bytes(write_scores(synthetic.generate(spec)))
    return 0


def _cmd_serialize(args) -> int:
    left = serialize.read_entity_table(Path(args.left).read_text())
    right = serialize.read_entity_table(Path(args.right).read_text())
    pairs = serialize.read_pairs_table(Path(args.pairs).read_text())
    dirty_seed = args.seed if args.dirty else None
    lines, sidecar = serialize.serialize_corpus(left, right, pairs, dirty_seed)
    Path(args.out).write_text("\n".join(lines) + "\n")
    sidecar_path = Path(args.out).with_suffix(Path(args.out).suffix + ".labels.csv")
    sidecar_path.write_text(
        "id,label\n" + "".join(f"{pid},{label}\n" for pid, label in sidecar)
    )
    print(f"wrote {len(lines)} pairs to {args.out} (labels: {sidecar_path})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emcal", description="Confidence-calibration toolkit for binary matchers"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="calibration and classification metrics")
    p.add_argument("--scores", required=True)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("calibrate", help="fit a calibration method")
    cal_sub = p.add_subparsers(dest="method", required=True)
    pt = cal_sub.add_parser("temperature")
    pt.add_argument("--val", required=True)
    pt.add_argument("--test", required=True)
    pt.add_argument("--grid-start", type=float, default=0.1)
    pt.add_argument("--grid-stop", type=float, default=10.0)
    pt.add_argument("--grid-step", type=float, default=0.1)
    pt.add_argument("--out", required=True)
    pt.set_defaults(func=_cmd_calibrate_temperature)

    p = sub.add_parser("combine", help="positional mean over aligned score files")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("select-dropout", help="dropout probability selection")
    p.add_argument("--baseline", required=True)
    p.add_argument("--candidates", required=True, help="dir of p=<value>.jsonl files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_select_dropout)

    p = sub.add_parser("ttest", help="significance test on per-run metric values")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--paired", action="store_true")
    p.add_argument("--metric", choices=list(_METRIC_FNS), required=True)
    p.set_defaults(func=_cmd_ttest)

    p = sub.add_parser("report", help="aggregate run directory into a results table")
    p.add_argument("--runs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("plot", help="render SVG diagnostics")
    p.add_argument("kind", choices=["reliability", "histogram"])
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log", action="store_true")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("simulate", help="generate synthetic score files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--distortion", default="identity", help="identity | temperature:T")
    p.add_argument("--base", choices=["uniform", "bimodal"], default="uniform")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serialize", help="serialize entity pairs to model input text")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dirty", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_serialize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AlignmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
