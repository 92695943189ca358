"""Score export: checkpoint inference over serialized entity pairs.

Reads the pair text file produced by the toolkit's `serialize` command
(one "[COL] ... [SEP] ..." line per pair) together with its id/label
sidecar CSV, runs a sequence-classification checkpoint, and writes the
toolkit's score JSONL schema, one file per sub-run. This module never
computes metrics; the contract is the file format.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer


class ExportError(Exception):
    """Invalid job configuration or malformed inputs."""


@dataclass(frozen=True)
class ExportJob:
    checkpoint_id: str
    pairs_file: str
    out_path: str
    subruns: int = 1
    dropout_enabled: bool = False
    seed: int = 0
    batch_size: int = 16

    def __post_init__(self):
        if self.subruns < 1:
            raise ExportError("subruns must be at least 1")
        if self.subruns >= 2 and not self.dropout_enabled:
            raise ExportError(
                "multiple sub-runs without dropout would be identical; enable dropout"
            )


def _read_pairs(pairs_file: str) -> tuple[list[str], list[tuple[str, int]]]:
    pairs_path = Path(pairs_file)
    if not pairs_path.exists():
        raise ExportError(f"pairs file not found: {pairs_file}")
    sidecar_path = Path(str(pairs_path) + ".labels.csv")
    if not sidecar_path.exists():
        raise ExportError(f"labels sidecar not found: {sidecar_path}")
    lines = pairs_path.read_text().splitlines()
    with sidecar_path.open() as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["id", "label"]:
            raise ExportError(f"sidecar header must be id,label, got {header}")
        sidecar = [(row[0], int(row[1])) for row in reader if row]
    if len(lines) != len(sidecar):
        raise ExportError(
            f"pairs file has {len(lines)} lines but sidecar has {len(sidecar)} rows"
        )
    return lines, sidecar


def _enable_inference_dropout(model: torch.nn.Module) -> list[str]:
    """Keep the model in eval mode but switch dropout modules to train mode."""
    enabled = []
    for name, module in model.named_modules():
        if isinstance(module, torch.nn.Dropout):
            module.train()
            enabled.append(name or "dropout")
    return enabled


def _positive_scores(model, tokenizer, texts: list[str], batch_size: int) -> list[float]:
    scores: list[float] = []
    for start in range(0, len(texts), batch_size):
        batch = texts[start : start + batch_size]
        encoded = tokenizer(
            batch, padding=True, truncation=True, return_tensors="pt"
        )
        with torch.no_grad():
            logits = model(**encoded).logits
        if logits.shape[-1] == 1:
            positive = torch.sigmoid(logits[:, 0])
        else:
            positive = torch.softmax(logits, dim=-1)[:, 1]
        scores.extend(float(p) for p in positive)
    return scores


def _subrun_path(out_path: str, subrun: int, subruns: int) -> Path:
    if subruns == 1:
        return Path(out_path)
    base = Path(out_path)
    return base.with_name(f"{base.stem}.subrun{subrun}{base.suffix or '.jsonl'}")


def export_scores(job: ExportJob) -> list[Path]:
    """Run inference and write one schema-conformant JSONL file per sub-run."""
    texts, sidecar = _read_pairs(job.pairs_file)
    try:
        tokenizer = AutoTokenizer.from_pretrained(job.checkpoint_id)
        model = AutoModelForSequenceClassification.from_pretrained(job.checkpoint_id)
    except (OSError, ValueError) as exc:
        raise ExportError(f"cannot load checkpoint {job.checkpoint_id!r}: {exc}") from exc
    model.eval()
    if job.dropout_enabled:
        enabled = _enable_inference_dropout(model)
        print(f"inference dropout enabled on {len(enabled)} modules")

    written = []
    for subrun in range(job.subruns):
        torch.manual_seed(job.seed + subrun)
        scores = _positive_scores(model, tokenizer, texts, job.batch_size)
        path = _subrun_path(job.out_path, subrun, job.subruns)
        with path.open("w") as handle:
            for (pair_id, label), score in zip(sidecar, scores):
                handle.write(
                    json.dumps(
                        {
                            "id": pair_id,
                            "score": float(format(score, ".17g")),
                            "label": label,
                            "run": 0,
                            "subrun": subrun,
                            "split": "test",
                        }
                    )
                    + "\n"
                )
        written.append(path)
    return written
