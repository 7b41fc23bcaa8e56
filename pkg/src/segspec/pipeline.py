"""Corpus-level batch jobs: feature extraction, consistency, benchmarking
and spectrogram images.

Every job walks a :class:`~segspec.synth_corpus.CorpusManifest` and emits
results in manifest order, whatever the worker count.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer, read_wav
from .classifier import FeatureTable
from .consistency import PLOT_COLUMNS, STRUCTURED_TAU, consistency_report, emit_plot_data
from .dsp import FrameConfig, power_spectrogram
from .errors import EmptyManifest, IoError, ParseError, SegspecError
from .features import FEATURE_NAMES, extract_feature_vector
from .segmentation import Full, SegmentPolicy, bind_reference, global_average_duration, resolve_segment

FEATURE_COLUMNS = ("filename",) + FEATURE_NAMES + ("label",)
ERROR_COLUMNS = ("filename", "error")
DB_FLOOR = 1e-10
DB_RANGE = 80.0


def bind_policy(policy: SegmentPolicy, manifest) -> SegmentPolicy:
    """Anchor an unbound ``TailFraction`` to the manifest's average duration."""
    return bind_reference(policy, global_average_duration(manifest))


def _extract_one(args):
    path, policy, cfg = args
    try:
        buf = read_wav(path)
        seg = resolve_segment(policy, len(buf), buf.sample_rate)
        return extract_feature_vector(buf, seg, cfg), None
    except SegspecError as exc:
        return None, type(exc).__name__


def _map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


@dataclass
class ExtractResult:
    rows: list = field(default_factory=list)     # (ManifestEntry, FeatureVector)
    errors: list = field(default_factory=list)   # (filename, error kind)
    policy: SegmentPolicy = Full()


def extract_corpus(manifest, policy: SegmentPolicy, cfg: FrameConfig | None = None,
                   workers: int = 1) -> ExtractResult:
    """Extract one feature vector per clip under ``policy``.

    Clips that fail land in ``errors``; rows and errors together cover the
    manifest exactly once.
    """
    if not manifest.entries:
        raise EmptyManifest("manifest has no entries")
    cfg = cfg or FrameConfig()
    policy = bind_policy(policy, manifest)
    jobs = [(manifest.path_of(e), policy, cfg) for e in manifest.entries]
    result = ExtractResult(policy=policy)
    for entry, (vec, err) in zip(manifest.entries, _map(_extract_one, jobs, workers)):
        if err is None:
            result.rows.append((entry, vec))
        else:
            result.errors.append((entry.filename, err))
    return result


def format_features_csv(rows) -> str:
    """Features CSV text; floats carry 9 significant digits."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FEATURE_COLUMNS)
    for entry, vec in rows:
        w.writerow([entry.filename, *(f"{v:.9g}" for v in vec.to_array()), entry.label])
    return out.getvalue()


def format_errors_csv(errors) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ERROR_COLUMNS)
    w.writerows(errors)
    return out.getvalue()


def write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def parse_features_csv(text: str) -> FeatureTable:
    """Features CSV text back into a :class:`FeatureTable` (labels sorted)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != FEATURE_COLUMNS:
        raise ParseError("features CSV header does not match the expected columns")
    X, labels, names = [], [], []
    for lineno, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != len(FEATURE_COLUMNS):
            raise ParseError(f"line {lineno}: expected {len(FEATURE_COLUMNS)} fields, got {len(row)}")
        try:
            values = [float(v) for v in row[1:-1]]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if not np.all(np.isfinite(values)):
            raise ParseError(f"line {lineno}: non-finite feature value")
        names.append(row[0])
        X.append(values)
        labels.append(row[-1])
    return FeatureTable.from_labels(np.array(X).reshape(-1, len(FEATURE_NAMES)), labels, names)


def read_features_csv(path) -> FeatureTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    return parse_features_csv(text)


def _consistency_one(args):
    path, clip_id, policies, baseline, cfg = args
    try:
        buf = read_wav(path)
        return consistency_report(buf, policies, baseline, cfg, clip_id), None
    except SegspecError as exc:
        return None, type(exc).__name__


@dataclass
class CorpusConsistency:
    reports: list
    errors: list

    def csv_text(self) -> str:
        parts = [emit_plot_data(r, header=(i == 0)) for i, r in enumerate(self.reports)]
        return "".join(parts) if parts else ",".join(PLOT_COLUMNS) + "\n"

    def fraction_below(self, tau: float = STRUCTURED_TAU) -> float:
        """Share of clips whose worst deviation (over all policies) is below ``tau``."""
        if not self.reports:
            return float("nan")
        return float(np.mean([r.max_deviation < tau for r in self.reports]))


def consistency_corpus(manifest, policies, baseline: SegmentPolicy = Full(),
                       cfg: FrameConfig | None = None, workers: int = 1) -> CorpusConsistency:
    if not manifest.entries:
        raise EmptyManifest("manifest has no entries")
    cfg = cfg or FrameConfig()
    policies = [bind_policy(p, manifest) for p in policies]
    baseline = bind_policy(baseline, manifest)
    jobs = [(manifest.path_of(e), e.filename, policies, baseline, cfg) for e in manifest.entries]
    reports, errors = [], []
    for entry, (rep, err) in zip(manifest.entries, _map(_consistency_one, jobs, workers)):
        if err is None:
            reports.append(rep)
            errors.extend((entry.filename, f"{row.policy}:{row.error}") for row in rep.rows if row.failed)
        else:
            errors.append((entry.filename, err))
    return CorpusConsistency(reports, errors)


@dataclass(frozen=True)
class BenchRow:
    policy: SegmentPolicy
    total_seconds: float
    clips: int
    samples: int

    @property
    def mean_seconds(self) -> float:
        return self.total_seconds / self.clips if self.clips else float("nan")


@dataclass
class BenchReport:
    rows: list
    decode_seconds: float
    total_samples: int

    def row(self, policy) -> BenchRow:
        for r in self.rows:
            if r.policy == policy:
                return r
        raise KeyError(str(policy))

    def speedup_vs_full(self, policy) -> float:
        full = self.row(Full())
        if policy == Full():
            return 1.0
        return full.total_seconds / self.row(policy).total_seconds

    def sample_ratio(self, policy) -> float:
        return self.row(policy).samples / self.total_samples

    def text(self) -> str:
        lines = [f"decode_seconds={self.decode_seconds:.4f} clips={self.rows[0].clips if self.rows else 0}",
                 f"{'policy':<20} {'total_s':>10} {'clips':>6} {'mean_s':>10} {'sample_ratio':>13} {'speedup':>8}"]
        for r in self.rows:
            lines.append(f"{str(r.policy):<20} {r.total_seconds:>10.4f} {r.clips:>6d} "
                         f"{r.mean_seconds:>10.5f} {self.sample_ratio(r.policy):>13.6f} "
                         f"{self.speedup_vs_full(r.policy):>8.2f}")
        return "\n".join(lines) + "\n"


def bench(manifest, policies, cfg: FrameConfig | None = None, repeats: int = 1) -> BenchReport:
    """Time single-threaded extraction per policy over the whole corpus.

    WAV decoding happens once up front and is reported separately.  Full is
    always measured since speedups are relative to it.  With ``repeats``
    above 1 the fastest pass per policy is kept.
    """
    if not manifest.entries:
        raise EmptyManifest("manifest has no entries")
    cfg = cfg or FrameConfig()
    policies = [bind_policy(p, manifest) for p in policies]
    if Full() not in policies:
        policies = [Full()] + policies

    t0 = time.perf_counter()
    buffers = [read_wav(manifest.path_of(e)) for e in manifest.entries]
    decode = time.perf_counter() - t0
    total_samples = sum(len(b) for b in buffers)

    rows = []
    for policy in policies:
        segments = [resolve_segment(policy, len(b), b.sample_rate) for b in buffers]
        best = float("inf")
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            for buf, seg in zip(buffers, segments):
                extract_feature_vector(buf, seg, cfg)
            best = min(best, time.perf_counter() - t0)
        rows.append(BenchRow(policy, best, len(buffers), sum(s.num_samples for s in segments)))
    return BenchReport(rows, decode, total_samples)


def spectrogram_image(buf: AudioBuffer, cfg: FrameConfig | None = None) -> np.ndarray:
    """8-bit dB image, shape ``(num_bins, num_frames)`` with bin 0 in the last row.

    ``db = 10 log10(power + 1e-10)`` is clamped to the top 80 dB and scaled
    to 0-255; a flat spectrogram maps to all zeros.
    """
    spec = power_spectrogram(buf, cfg or FrameConfig())
    db = 10.0 * np.log10(spec.power + DB_FLOOR)
    top = db.max()
    lo = max(db.min(), top - DB_RANGE)
    db = np.clip(db, lo, top)
    span = top - lo
    scaled = np.zeros_like(db) if span <= 0 else np.round(255.0 * (db - lo) / span)
    return scaled.T[::-1].astype(np.uint8)


def encode_pgm(image: np.ndarray) -> bytes:
    height, width = image.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + np.ascontiguousarray(image, dtype=np.uint8).tobytes()


def decode_pgm(data: bytes) -> np.ndarray:
    """Inverse of :func:`encode_pgm` (no comment lines)."""
    # exactly one whitespace byte separates the header from the pixels
    parts = data.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P5" or parts[2] != b"255":
        raise ParseError("not an 8-bit binary PGM")
    width, height = (int(v) for v in parts[1].split())
    pixels = np.frombuffer(parts[3][:width * height], dtype=np.uint8)
    if pixels.size != width * height:
        raise ParseError("PGM pixel data truncated")
    return pixels.reshape(height, width)


def write_spectrogram(wav_path, out_path, cfg: FrameConfig | None = None) -> tuple:
    image = spectrogram_image(read_wav(wav_path), cfg)
    try:
        Path(out_path).write_bytes(encode_pgm(image))
    except OSError as exc:
        raise IoError(f"{out_path}: {exc.strerror or exc}") from exc
    return image.shape
