"""Accuracy-versus-segment grids on synthetic corpora.

Each grid cell extracts a features table under one segment policy, trains
a fresh classifier with the same seed and records its eval accuracy.

* :func:`run_table1_analog` uses a structured corpus (stationary clips),
  where any head length should classify about as well as the whole clip.
* :func:`run_table2_analog` uses an unstructured corpus whose clips open
  on a section shared by every genre and close on the genre's own voicing,
  so a short head is uninformative while the tail carries the label.
"""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifier import FeatureTable, TrainConfig, train
from .dsp import FrameConfig
from .pipeline import extract_corpus, write_text
from .segmentation import Full, Head, TailFraction
from .synth_corpus import CorpusManifest, read_manifest

TABLE_COLUMNS = ("policy", "accuracy", "train_seconds", "extract_seconds")
TABLE1_DURATIONS = (3.0, 5.0, 10.0, 30.0)
TABLE2_POLICIES = (Head(5.0), Head(20.0), Full(), TailFraction(0.10, 180.0))


@dataclass(frozen=True)
class GridRow:
    policy: object
    accuracy: float
    train_seconds: float
    extract_seconds: float
    clips: int


def _manifest(corpus) -> CorpusManifest:
    if isinstance(corpus, CorpusManifest):
        return corpus
    path = Path(corpus)
    return read_manifest(path / "manifest.csv" if path.is_dir() else path)


def run_grid(corpus, policies, cfg: FrameConfig | None = None,
             train_config: TrainConfig = TrainConfig(), split=(0.8, 0.2),
             workers: int = 1) -> list:
    """Extract, train and evaluate once per policy, sequentially."""
    manifest = _manifest(corpus)
    rows = []
    for policy in policies:
        t0 = time.perf_counter()
        result = extract_corpus(manifest, policy, cfg, workers)
        extract_s = time.perf_counter() - t0
        X = np.array([vec.to_array() for _, vec in result.rows])
        labels = [entry.label for entry, _ in result.rows]
        table = FeatureTable.from_labels(X, labels, [e.filename for e, _ in result.rows])
        t0 = time.perf_counter()
        trained = train(table, split, train_config)
        train_s = time.perf_counter() - t0
        rows.append(GridRow(result.policy, trained.eval_accuracy, train_s, extract_s, len(result.rows)))
    return rows


def run_table1_analog(corpus, durations=TABLE1_DURATIONS, **kwargs) -> list:
    """Head(d) for each duration on a structured corpus."""
    return run_grid(corpus, [Head(float(d)) for d in durations], **kwargs)


def run_table2_analog(corpus, policies=TABLE2_POLICIES, **kwargs) -> list:
    """Head, full and tail-slot policies on an unstructured corpus."""
    return run_grid(corpus, list(policies), **kwargs)


def format_table(rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for r in rows:
        w.writerow([str(r.policy), f"{r.accuracy:.4f}", f"{r.train_seconds:.3f}", f"{r.extract_seconds:.3f}"])
    return out.getvalue()


def write_table(path, rows) -> None:
    write_text(path, format_table(rows))


def read_table(text: str) -> list:
    return [dict(r, accuracy=float(r["accuracy"])) for r in csv.DictReader(io.StringIO(text))]


def max_accuracy_gap(rows) -> float:
    acc = [r.accuracy for r in rows]
    return max(acc) - min(acc)
