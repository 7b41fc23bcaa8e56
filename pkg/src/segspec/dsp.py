"""Framing, windowing, FFT and power spectrograms.

The FFT is an iterative radix-2 decimation-in-time transform, vectorized
across frames.  Real input of length ``n`` is packed into a complex
sequence of length ``n/2`` and untangled afterwards, which halves the
butterfly work.  :func:`dft_naive` evaluates the DFT sum directly and is
kept alongside as the reference the FFT is checked against.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .audio_io import AudioBuffer
from .errors import InvalidParams, TooShort

# frames per FFT batch; small batches keep the butterflies cache-resident
_FFT_BATCH = 32


@dataclass(frozen=True)
class FrameConfig:
    n_fft: int = 2048
    hop: int = 512
    window: str = "hann"

    def __post_init__(self):
        n = self.n_fft
        if not isinstance(n, (int, np.integer)) or n < 16 or n & (n - 1):
            raise InvalidParams(f"n_fft must be a power of two >= 16, got {n!r}")
        if not 0 < self.hop <= n:
            raise InvalidParams(f"hop must be in (0, n_fft], got {self.hop!r}")
        if self.window != "hann":
            raise InvalidParams(f"unsupported window {self.window!r}")

    @property
    def num_bins(self) -> int:
        return self.n_fft // 2 + 1

    def num_frames(self, num_samples: int) -> int:
        if num_samples < self.n_fft:
            return 0
        return (num_samples - self.n_fft) // self.hop + 1


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """Power spectrogram ``|X|**2`` with shape ``(num_frames, num_bins)``."""

    power: np.ndarray
    bin_freqs: np.ndarray
    frame_times: np.ndarray
    config: FrameConfig = field(default_factory=FrameConfig)
    sample_rate: int = 22050

    @property
    def num_frames(self) -> int:
        return self.power.shape[0]

    @property
    def magnitude(self) -> np.ndarray:
        return np.sqrt(self.power)


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window ``0.5 - 0.5 cos(2 pi k / n)``."""
    if n < 1:
        raise InvalidParams("window length must be >= 1")
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def frame_signal(buf: AudioBuffer, cfg: FrameConfig) -> np.ndarray:
    """Read-only ``(num_frames, n_fft)`` view; the trailing partial frame is dropped."""
    x = buf.samples if isinstance(buf, AudioBuffer) else np.asarray(buf, dtype=np.float64)
    if x.size < cfg.n_fft:
        raise TooShort(f"{x.size} samples is shorter than one {cfg.n_fft}-sample frame")
    windows = np.lib.stride_tricks.sliding_window_view(x, cfg.n_fft)
    return windows[::cfg.hop]


@lru_cache(maxsize=None)
def _fft_plan(n: int):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = []
    m = 1
    while m < n:
        twiddles.append(np.exp(-1j * np.pi * np.arange(m) / m))
        m *= 2
    return rev, tuple(twiddles)


def _fft_complex(z: np.ndarray) -> np.ndarray:
    """Radix-2 DIT FFT along the last axis of a 2-D complex array."""
    batch, n = z.shape
    if n == 1:
        return z.copy()
    rev, twiddles = _fft_plan(n)
    x = z[:, rev]
    out = np.empty_like(x)
    m = 1
    for w in twiddles:
        xv = x.reshape(batch, n // (2 * m), 2, m)
        ov = out.reshape(batch, n // (2 * m), 2, m)
        t = xv[:, :, 1, :] * w
        np.add(xv[:, :, 0, :], t, out=ov[:, :, 0, :])
        np.subtract(xv[:, :, 0, :], t, out=ov[:, :, 1, :])
        x, out = out, x
        m *= 2
    return x


@lru_cache(maxsize=None)
def _untangle_factors(n: int):
    h = n // 2
    return (-np.arange(h)) % h, np.exp(-2j * np.pi * np.arange(h) / n)


def _rfft_batch(frames: np.ndarray) -> np.ndarray:
    batch, n = frames.shape
    h = n // 2
    z = np.empty((batch, h), dtype=np.complex128)
    z.real = frames[:, 0::2]
    z.imag = frames[:, 1::2]
    zf = _fft_complex(z)
    mirror, twiddle = _untangle_factors(n)
    zc = np.conj(zf[:, mirror])
    even = 0.5 * (zf + zc)
    odd = -0.5j * (zf - zc)
    out = np.empty((batch, h + 1), dtype=np.complex128)
    out[:, :h] = even + twiddle * odd
    out[:, h] = even[:, 0] - odd[:, 0]
    return out


def fft_real(frame) -> np.ndarray:
    """One-sided DFT ``X[k] = sum_t x[t] exp(-2 pi i k t / n)``, ``k = 0..n/2``.

    Accepts a single frame or a 2-D stack of frames (transform along the
    last axis).  The length must be a power of two.
    """
    x = np.asarray(frame, dtype=np.float64)
    n = x.shape[-1]
    if n < 1 or n & (n - 1):
        raise InvalidParams(f"fft_real needs a power-of-two length, got {n}")
    single = x.ndim == 1
    x2 = x.reshape(-1, n)
    if n == 1:
        out = x2.astype(np.complex128)
    else:
        out = np.concatenate(
            [_rfft_batch(x2[i:i + _FFT_BATCH]) for i in range(0, x2.shape[0], _FFT_BATCH)]
        ) if x2.shape[0] else np.empty((0, n // 2 + 1), dtype=np.complex128)
    return out[0] if single else out.reshape(x.shape[:-1] + (n // 2 + 1,))


def dft_naive(frame) -> np.ndarray:
    """Direct O(n^2) evaluation of the one-sided DFT (reference for :func:`fft_real`)."""
    x = np.asarray(frame, dtype=np.float64)
    n = x.size
    if n < 1:
        raise InvalidParams("dft_naive needs at least one sample")
    k = np.arange(n // 2 + 1)[:, None]
    t = np.arange(n)[None, :]
    # reduce k*t mod n first so the phase stays accurate for large n
    phase = -2.0 * np.pi * ((k * t) % n) / n
    return np.exp(1j * phase) @ x


def power_spectrogram(buf: AudioBuffer, cfg: FrameConfig | None = None) -> Spectrogram:
    cfg = cfg or FrameConfig()
    frames = frame_signal(buf, cfg)
    window = hann_window(cfg.n_fft)
    num_frames = frames.shape[0]
    power = np.empty((num_frames, cfg.num_bins))
    for i in range(0, num_frames, _FFT_BATCH):
        spec = _rfft_batch(frames[i:i + _FFT_BATCH] * window)
        power[i:i + _FFT_BATCH] = spec.real ** 2 + spec.imag ** 2
    sr = buf.sample_rate
    bin_freqs = np.arange(cfg.num_bins) * sr / cfg.n_fft
    frame_times = (np.arange(num_frames) * cfg.hop + cfg.n_fft / 2) / sr
    return Spectrogram(power, bin_freqs, frame_times, cfg, sr)
