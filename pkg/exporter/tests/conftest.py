"""Fixtures: a tiny local checkpoint and a 10-pair serialized corpus.

The public model hub is unreachable in CI, so the "small checkpoint" is
a randomly initialized two-label BERT saved locally; the exporter treats
any loadable checkpoint directory as opaque, which is the contract under
test. The pairs corpus comes from the toolkit's own `serialize` command
so the exporter is only ever fed its published file formats.
"""

from __future__ import annotations

import subprocess
import sys

import pytest
import torch
from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast

_VOCAB = (
    "[PAD] [UNK] [CLS] [SEP] [MASK] [COL] [VAL] name price title ipad pixel sony "
    "##s 499 399 489 the a 0 1 2 3 4 5 6 7 8 9".split()
)


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    path = tmp_path_factory.mktemp("checkpoint")
    vocab_file = path / "vocab.txt"
    vocab_file.write_text("\n".join(_VOCAB) + "\n")
    tokenizer = BertTokenizerFast(vocab_file=str(vocab_file))
    config = BertConfig(
        vocab_size=len(_VOCAB),
        hidden_size=16,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=128,
        num_labels=2,
        hidden_dropout_prob=0.1,
        attention_probs_dropout_prob=0.1,
    )
    torch.manual_seed(0)
    model = BertForSequenceClassification(config)
    model.save_pretrained(path)
    tokenizer.save_pretrained(path)
    return str(path)


@pytest.fixture(scope="session")
def pairs_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("pairs")
    left_rows = ["id,name,price"] + [f"L{i},item {i} name,{100 + i}" for i in range(10)]
    right_rows = ["id,name,price"] + [f"R{i},item {i} title,{100 + i}" for i in range(10)]
    pair_rows = ["left_id,right_id,label"] + [f"L{i},R{i},{i % 2}" for i in range(10)]
    (path / "left.csv").write_text("\n".join(left_rows) + "\n")
    (path / "right.csv").write_text("\n".join(right_rows) + "\n")
    (path / "pairs.csv").write_text("\n".join(pair_rows) + "\n")
    out = path / "pairs.txt"
    run_emcal(
        "serialize",
        "--left", str(path / "left.csv"),
        "--right", str(path / "right.csv"),
        "--pairs", str(path / "pairs.csv"),
        "--out", str(out),
    )
    return str(out)


def run_emcal(*args: str) -> subprocess.CompletedProcess:
    """Invoke the primary toolkit through its CLI, its external interface."""
    proc = subprocess.run(
        [sys.executable, "-m", "emcal.cli", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc
