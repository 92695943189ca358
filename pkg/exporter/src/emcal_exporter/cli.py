"""CLI: export checkpoint scores as toolkit-schema JSONL.

Exit codes: 0 success, 2 configuration/input error.
"""

from __future__ import annotations

import argparse
import sys

from .export import ExportError, ExportJob, export_scores


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emcal-export",
        description="Run a sequence-classification checkpoint over serialized pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export")
    p.add_argument("--checkpoint", required=True, help="model id or local checkpoint path")
    p.add_argument("--pairs", required=True, help="pair text file (sidecar .labels.csv required)")
    p.add_argument("--out", required=True)
    p.add_argument("--subruns", type=int, default=1)
    p.add_argument("--dropout", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(
            checkpoint_id=args.checkpoint,
            pairs_file=args.pairs,
            out_path=args.out,
            subruns=args.subruns,
            dropout_enabled=args.dropout,
            seed=args.seed,
        )
        written = export_scores(job)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
