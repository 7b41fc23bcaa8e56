"""Frame-level spectral features and the 26-value clip summary.

Per-frame features come back as ``(num_frames, d)`` arrays; :func:`aggregate`
averages them over frames.  Conventions:

* centroid and bandwidth weight bins by magnitude ``sqrt(power)``,
  roll-off accumulates power;
* ZCR and RMS are computed on raw (unwindowed) samples of each frame;
* ratio-style features of an all-zero frame are 0, never NaN.
"""
from __future__ import annotations

from dataclasses import astuple, dataclass
from functools import lru_cache

import numpy as np

from .audio_io import AudioBuffer
from .dsp import FrameConfig, Spectrogram, frame_signal, power_spectrogram
from .errors import EmptySegment, EmptySeries, InvalidOrder, InvalidParams, InvalidThreshold, TooShort

N_MFCC = 20
N_MELS = 128
LOG_FLOOR = 1e-10
CHROMA_FMIN = 27.5
A4_HZ = 440.0
A_PITCH_CLASS = 9

FEATURE_NAMES = (
    "chroma_stft", "rmse", "spectral_centroid", "spectral_bandwidth",
    "rolloff", "zero_crossing_rate",
) + tuple(f"mfcc{i}" for i in range(1, N_MFCC + 1))


@dataclass(frozen=True)
class FeatureVector:
    """Clip-level feature row, in features-CSV column order."""

    chroma_stft: float
    rmse: float
    spectral_centroid: float
    spectral_bandwidth: float
    rolloff: float
    zero_crossing_rate: float
    mfcc: tuple

    def __post_init__(self):
        object.__setattr__(self, "mfcc", tuple(float(c) for c in self.mfcc))
        if len(self.mfcc) != N_MFCC:
            raise ValueError(f"expected {N_MFCC} MFCCs, got {len(self.mfcc)}")

    def to_array(self) -> np.ndarray:
        scalars = astuple(self)[:6]
        return np.array(scalars + self.mfcc, dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        v = [float(x) for x in values]
        if len(v) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {len(v)}")
        return cls(*v[:6], mfcc=tuple(v[6:]))

    def as_dict(self) -> dict:
        return dict(zip(FEATURE_NAMES, self.to_array()))


def zero_crossing_rate(buf: AudioBuffer, cfg: FrameConfig | None = None) -> np.ndarray:
    """Fraction of adjacent sample pairs whose signs differ, per frame.

    Zero counts as non-negative.  The count is divided by ``n_fft``, so a
    frame of alternating signs scores ``(n_fft - 1) / n_fft``.
    """
    cfg = cfg or FrameConfig()
    frames = frame_signal(buf, cfg)
    negative = np.signbit(frames) & (frames != 0)
    crossings = np.count_nonzero(negative[:, 1:] != negative[:, :-1], axis=1)
    return (crossings / cfg.n_fft)[:, None]


def rms_energy(buf: AudioBuffer, cfg: FrameConfig | None = None) -> np.ndarray:
    cfg = cfg or FrameConfig()
    frames = frame_signal(buf, cfg)
    return np.sqrt(np.mean(frames ** 2, axis=1))[:, None]


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def spectral_centroid(spec: Spectrogram) -> np.ndarray:
    mag = spec.magnitude
    return _safe_ratio(mag @ spec.bin_freqs, mag.sum(axis=1))[:, None]


def spectral_bandwidth(spec: Spectrogram, p: float = 2) -> np.ndarray:
    """Order-``p`` spread of the normalized magnitude around the centroid."""
    if p < 1:
        raise InvalidOrder(f"bandwidth order must be >= 1, got {p}")
    mag = spec.magnitude
    total = mag.sum(axis=1, keepdims=True)
    weights = _safe_ratio(mag, np.broadcast_to(total, mag.shape))
    centroid = spectral_centroid(spec)
    dev = np.abs(spec.bin_freqs[None, :] - centroid) ** p
    return (np.sum(weights * dev, axis=1) ** (1.0 / p))[:, None]


def spectral_rolloff(spec: Spectrogram, threshold: float = 0.85) -> np.ndarray:
    """Lowest bin frequency whose cumulative power reaches ``threshold`` of the total."""
    if not 0 < threshold <= 1:
        raise InvalidThreshold(f"threshold must be in (0, 1], got {threshold}")
    cum = np.cumsum(spec.power, axis=1)
    total = cum[:, -1:]
    # compare fractions, not threshold*total: 0.85*100 rounds above 85
    frac = _safe_ratio(cum, np.broadcast_to(total, cum.shape))
    idx = np.argmax(frac >= threshold, axis=1)
    out = spec.bin_freqs[idx]
    out[total[:, 0] <= 0] = 0.0
    return out[:, None]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=16)
def _mel_filterbank(n_mels: int, sample_rate: int, n_fft: int) -> np.ndarray:
    points = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_mels + 2))
    freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    lower, center, upper = points[:-2, None], points[1:-1, None], points[2:, None]
    rising = (freqs[None, :] - lower) / (center - lower)
    falling = (upper - freqs[None, :]) / (upper - center)
    fb = np.maximum(0.0, np.minimum(rising, falling))
    fb.flags.writeable = False
    return fb


def mel_filterbank(n_mels: int = N_MELS, sample_rate: int = 22050, n_fft: int = 2048) -> np.ndarray:
    """Triangular HTK-mel filters, shape ``(n_mels, n_fft/2 + 1)``, apex weight 1.

    Filter ``m`` rises from mel point ``m`` to ``m+1`` and falls to ``m+2``;
    the ``n_mels + 2`` points are equally spaced in mel from 0 Hz to Nyquist.
    """
    if n_mels < 2 or sample_rate <= 0 or n_fft < 2:
        raise InvalidParams(f"bad filterbank params n_mels={n_mels} sr={sample_rate} n_fft={n_fft}")
    return _mel_filterbank(int(n_mels), int(sample_rate), int(n_fft))


def mel_centers(n_mels: int = N_MELS, sample_rate: int = 22050) -> np.ndarray:
    return mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_mels + 2))[1:-1]


@lru_cache(maxsize=16)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix; row ``k`` gives coefficient ``k``."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    d = np.sqrt(2.0 / n) * np.cos(np.pi * k * (2 * j + 1) / (2 * n))
    d[0] /= np.sqrt(2.0)
    d.flags.writeable = False
    return d


def log_mel_energies(spec: Spectrogram, n_mels: int = N_MELS) -> np.ndarray:
    fb = mel_filterbank(n_mels, spec.sample_rate, spec.config.n_fft)
    return np.log(np.maximum(spec.power @ fb.T, LOG_FLOOR))


def mfcc(spec: Spectrogram, n_mfcc: int = N_MFCC, n_mels: int = N_MELS) -> np.ndarray:
    if not 1 <= n_mfcc <= n_mels:
        raise InvalidParams(f"n_mfcc must be in [1, n_mels], got {n_mfcc}")
    return log_mel_energies(spec, n_mels) @ dct_matrix(n_mels)[:n_mfcc].T


def pitch_class(freqs) -> np.ndarray:
    """Nearest-semitone pitch class with A (440 Hz) = 9; -1 below 27.5 Hz."""
    freqs = np.asarray(freqs, dtype=np.float64)
    out = np.full(freqs.shape, -1, dtype=np.int64)
    ok = freqs >= CHROMA_FMIN
    semis = np.round(12.0 * np.log2(freqs[ok] / A4_HZ)).astype(np.int64)
    out[ok] = (semis + A_PITCH_CLASS) % 12
    return out


@lru_cache(maxsize=16)
def _chroma_map(sample_rate: int, n_fft: int) -> np.ndarray:
    classes = pitch_class(np.arange(n_fft // 2 + 1) * sample_rate / n_fft)
    cmap = np.zeros((classes.size, 12))
    ok = classes >= 0
    cmap[np.nonzero(ok)[0], classes[ok]] = 1.0
    cmap.flags.writeable = False
    return cmap


def chroma_stft(spec: Spectrogram) -> np.ndarray:
    """12-class pitch profile per frame, each frame scaled so its peak is 1."""
    energy = spec.power @ _chroma_map(spec.sample_rate, spec.config.n_fft)
    peak = energy.max(axis=1, keepdims=True)
    return _safe_ratio(energy, np.broadcast_to(peak, energy.shape))


def aggregate(series) -> np.ndarray:
    values = np.asarray(series, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] < 1:
        raise EmptySeries("cannot aggregate a series with no frames")
    return values.mean(axis=0)


def extract_feature_vector(buf: AudioBuffer, segment=None, cfg: FrameConfig | None = None) -> FeatureVector:
    """Summarize ``buf[segment]`` as a :class:`FeatureVector`.

    ``segment`` is a resolved :class:`~segspec.segmentation.Segment` (or
    ``None`` for the whole buffer).  The spectrogram is computed once and
    shared by the spectral features.
    """
    cfg = cfg or FrameConfig()
    if segment is not None:
        if segment.end_sample <= segment.start_sample:
            raise EmptySegment(f"empty segment {segment}")
        buf = buf.slice(segment.start_sample, segment.end_sample)
    if len(buf) < cfg.n_fft:
        raise TooShort(f"segment of {len(buf)} samples is shorter than n_fft={cfg.n_fft}")
    spec = power_spectrogram(buf, cfg)
    return FeatureVector(
        chroma_stft=float(aggregate(chroma_stft(spec)).mean()),
        rmse=float(aggregate(rms_energy(buf, cfg))[0]),
        spectral_centroid=float(aggregate(spectral_centroid(spec))[0]),
        spectral_bandwidth=float(aggregate(spectral_bandwidth(spec))[0]),
        rolloff=float(aggregate(spectral_rolloff(spec))[0]),
        zero_crossing_rate=float(aggregate(zero_crossing_rate(buf, cfg))[0]),
        mfcc=tuple(aggregate(mfcc(spec))),
    )
