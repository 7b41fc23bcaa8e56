import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from segspec.audio_io import AudioBuffer
from segspec.dsp import FrameConfig, dft_naive, fft_real, frame_signal, hann_window, power_spectrogram
from segspec.errors import InvalidParams, TooShort

from conftest import SR


def _direct_dft(x):
    """Independent oracle: explicit double loop, no shared helpers."""
    n = len(x)
    out = []
    for k in range(n // 2 + 1):
        acc = 0j
        for t in range(n):
            acc += x[t] * complex(np.cos(2 * np.pi * k * t / n), -np.sin(2 * np.pi * k * t / n))
        out.append(acc)
    return np.array(out)


def test_hann_examples():
    assert np.allclose(hann_window(4), [0.0, 0.5, 1.0, 0.5], atol=1e-15)
    assert hann_window(1).tolist() == [0.0]
    assert hann_window(2048).sum() == pytest.approx(1024.0, abs=1e-9)


def test_frame_counts():
    cfg = FrameConfig()
    assert frame_signal(AudioBuffer(np.zeros(2048), SR), cfg).shape == (1, 2048)
    assert frame_signal(AudioBuffer(np.zeros(4096), SR), cfg).shape == (5, 2048)
    with pytest.raises(TooShort):
        frame_signal(AudioBuffer(np.zeros(2047), SR), cfg)


def test_frame_contents():
    x = np.arange(100) / 100.0
    frames = frame_signal(AudioBuffer(x, SR), FrameConfig(n_fft=16, hop=8))
    assert frames.shape == ((100 - 16) // 8 + 1, 16)
    for i, f in enumerate(frames):
        assert np.array_equal(f, x[i * 8:i * 8 + 16])


@pytest.mark.parametrize("kw", [dict(n_fft=1000), dict(n_fft=8), dict(hop=0), dict(hop=4096), dict(window="hamming")])
def test_frame_config_validation(kw):
    with pytest.raises(InvalidParams):
        FrameConfig(**kw)


def test_fft_small_examples():
    assert np.allclose(fft_real([1, 1, 1, 1]), [4, 0, 0])
    assert np.allclose(fft_real([1, -1, 1, -1]), [0, 0, 4])
    assert np.allclose(dft_naive([1.0]), [1.0])
    assert np.allclose(dft_naive([0, 0, 0, 0]), [0, 0, 0])


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64])
def test_fft_matches_direct_loop(rng, n):
    x = rng.standard_normal(n)
    assert np.max(np.abs(fft_real(x) - _direct_dft(x))) < 1e-9
    assert np.max(np.abs(dft_naive(x) - _direct_dft(x))) < 1e-9


def test_fft_matches_naive_on_random_frames(rng):
    for n in (32, 64):
        for _ in range(100):
            x = rng.standard_normal(n)
            assert np.max(np.abs(fft_real(x) - dft_naive(x))) < 1e-9


def test_fft_large_against_numpy(rng):
    x = rng.standard_normal((3, 2048))
    assert np.max(np.abs(fft_real(x) - np.fft.rfft(x))) < 1e-9


def test_fft_rejects_non_power_of_two():
    with pytest.raises(InvalidParams):
        fft_real(np.zeros(12))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-10, 10), st.floats(-10, 10))
def test_fft_linearity(seed, a, b):
    g = np.random.default_rng(seed)
    x, y = g.standard_normal(64), g.standard_normal(64)
    lhs = fft_real(a * x + b * y)
    rhs = a * fft_real(x) + b * fft_real(y)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_zero_signal_power():
    spec = power_spectrogram(AudioBuffer(np.zeros(8192), SR))
    assert np.all(spec.power == 0)


def test_bin_centered_sinusoid_peaks_at_bin():
    cfg = FrameConfig()
    f = 8 * SR / cfg.n_fft
    t = np.arange(4096) / SR
    spec = power_spectrogram(AudioBuffer(0.5 * np.sin(2 * np.pi * f * t), SR), cfg)
    assert int(np.argmax(spec.power[0])) == 8


def test_spectrogram_axes():
    cfg = FrameConfig(n_fft=256, hop=64)
    spec = power_spectrogram(AudioBuffer(np.zeros(1000), 8000), cfg)
    assert spec.power.shape == (cfg.num_frames(1000), 129)
    assert spec.bin_freqs[-1] == 4000.0
    assert np.all(np.diff(spec.bin_freqs) > 0)
    assert np.allclose(spec.frame_times, (np.arange(spec.num_frames) * 64 + 128) / 8000)


def _parseval_rel_errors(buf, cfg):
    frames = frame_signal(buf, cfg)
    w = hann_window(cfg.n_fft)
    time_energy = np.sum((frames * w) ** 2, axis=1)
    p = power_spectrogram(buf, cfg).power
    n = cfg.n_fft
    freq_energy = (p[:, 0] + p[:, -1] + 2 * p[:, 1:-1].sum(axis=1)) / n
    return np.abs(time_energy - freq_energy) / np.maximum(time_energy, 1e-300)


def test_parseval_every_frame(rng):
    cfg = FrameConfig()
    for _ in range(3):
        buf = AudioBuffer(rng.uniform(-1, 1, 3 * SR), SR)
        assert np.max(_parseval_rel_errors(buf, cfg)) < 1e-6


def test_time_shift_by_one_hop(rng):
    cfg = FrameConfig(n_fft=512, hop=128)
    x = rng.uniform(-1, 1, 6000)
    shifted = np.concatenate([rng.uniform(-1, 1, cfg.hop), x])
    a = power_spectrogram(AudioBuffer(x, SR), cfg).power
    b = power_spectrogram(AudioBuffer(shifted, SR), cfg).power
    m = min(a.shape[0], b.shape[0] - 1)
    assert np.max(np.abs(b[1:m + 1] - a[:m])) < 1e-9


def test_batched_equals_single_frame(rng):
    frames = rng.standard_normal((70, 128))
    batched = fft_real(frames)
    single = np.array([fft_real(f) for f in frames])
    assert np.array_equal(batched, single)
