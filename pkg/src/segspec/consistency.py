"""How much do clip features drift when less of the clip is processed?

The drift of one feature is its relative error against a baseline
extraction (normally the full clip), floored so a zero baseline does not
blow up::

    deviation_i = |a_i - b_i| / max(|b_i|, 1e-6)

A report row's headline number is the maximum over all 26 features.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .audio_io import AudioBuffer
from .dsp import FrameConfig
from .errors import InvalidParams, SegspecError
from .features import FEATURE_NAMES, FeatureVector, extract_feature_vector
from .segmentation import Full, Head, SegmentPolicy, resolve_segment

DEVIATION_FLOOR = 1e-6
STRUCTURED_TAU = 0.05
PLOT_COLUMNS = ("clip_id", "policy", "feature", "baseline_value", "value", "deviation")


def relative_deviation(a, b) -> np.ndarray:
    """Per-feature ``|a - b| / max(|b|, 1e-6)``; ``b`` is the baseline."""
    a = a.to_array() if isinstance(a, FeatureVector) else np.asarray(a, dtype=np.float64)
    b = b.to_array() if isinstance(b, FeatureVector) else np.asarray(b, dtype=np.float64)
    return np.abs(a - b) / np.maximum(np.abs(b), DEVIATION_FLOOR)


@dataclass
class ConsistencyRow:
    policy: SegmentPolicy
    vector: Optional[FeatureVector] = None
    deviations: Optional[np.ndarray] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations)) if self.deviations is not None else float("nan")


@dataclass
class ConsistencyReport:
    clip_id: str
    baseline_policy: SegmentPolicy
    baseline: FeatureVector
    rows: list = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        ok = [r.max_deviation for r in self.rows if not r.failed]
        return max(ok) if ok else float("nan")


def consistency_report(buf: AudioBuffer, policies, baseline: SegmentPolicy = Full(),
                       cfg: FrameConfig | None = None, clip_id: str = "") -> ConsistencyReport:
    """Compare each policy's feature vector against the baseline policy's.

    A policy that cannot be resolved or is too short yields a failed row
    carrying the error class name; the baseline itself must succeed.
    """
    cfg = cfg or FrameConfig()
    n, sr = len(buf), buf.sample_rate
    base_vec = extract_feature_vector(buf, resolve_segment(baseline, n, sr), cfg)
    report = ConsistencyReport(clip_id, baseline, base_vec)
    for policy in policies:
        if policy == baseline:
            report.rows.append(ConsistencyRow(policy, base_vec, np.zeros(len(FEATURE_NAMES))))
            continue
        try:
            vec = extract_feature_vector(buf, resolve_segment(policy, n, sr), cfg)
        except SegspecError as exc:
            report.rows.append(ConsistencyRow(policy, error=type(exc).__name__))
            continue
        report.rows.append(ConsistencyRow(policy, vec, relative_deviation(vec, base_vec)))
    return report


def structuredness_score(buf: AudioBuffer, probe_durations, cfg: FrameConfig | None = None) -> float:
    """Worst feature drift of ``Head(d)`` probes against the full clip.

    A clip counts as structured when the score is below
    :data:`STRUCTURED_TAU`.  Probe failures propagate.
    """
    probes = list(probe_durations)
    if len(probes) < 1:
        raise InvalidParams("need at least one probe duration")
    cfg = cfg or FrameConfig()
    report = consistency_report(buf, [Head(d) for d in probes], Full(), cfg)
    for row in report.rows:
        if row.failed:
            raise InvalidParams(f"probe {row.policy} failed: {row.error}")
    return report.max_deviation


def is_structured(score: float, tau: float = STRUCTURED_TAU) -> bool:
    return score < tau


def emit_plot_data(report: ConsistencyReport, header: bool = True) -> str:
    """CSV text, one line per (policy, feature); failed rows are skipped."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    if header:
        w.writerow(PLOT_COLUMNS)
    base = report.baseline.to_array()
    for row in report.rows:
        if row.failed:
            continue
        values = row.vector.to_array()
        for name, b, v, d in zip(FEATURE_NAMES, base, values, row.deviations):
            w.writerow([report.clip_id, str(row.policy), name, f"{b:.9g}", f"{v:.9g}", f"{d:.9g}"])
    return out.getvalue()


def read_plot_data(text: str) -> list:
    """Parse :func:`emit_plot_data` output back into dict rows with float values."""
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        for key in ("baseline_value", "value", "deviation"):
            r[key] = float(r[key])
        rows.append(r)
    return rows
