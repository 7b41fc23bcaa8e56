import math

import numpy as np
import pytest

from segspec.audio_io import AudioBuffer
from segspec.dsp import FrameConfig, Spectrogram, power_spectrogram
from segspec.errors import EmptySegment, EmptySeries, InvalidOrder, InvalidThreshold, TooShort
from segspec.features import (FEATURE_NAMES, N_MELS, FeatureVector, aggregate, chroma_stft, dct_matrix,
                              extract_feature_vector, hz_to_mel, mel_centers, mel_filterbank, mel_to_hz,
                              mfcc, pitch_class, rms_energy, spectral_bandwidth, spectral_centroid,
                              spectral_rolloff, zero_crossing_rate)
from segspec.segmentation import Segment

from conftest import SR, tone


def _spec_from_rows(rows, n_fft=2048, sr=SR):
    power = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    cfg = FrameConfig(n_fft=n_fft, hop=n_fft // 4)
    freqs = np.arange(n_fft // 2 + 1) * sr / n_fft
    return Spectrogram(power, freqs, np.zeros(power.shape[0]), cfg, sr)


def _one_bin(k, n_bins=1025, value=1.0):
    row = np.zeros(n_bins)
    row[k] = value
    return row


# --- ZCR / RMS -------------------------------------------------------------

def test_zcr_constant_and_alternating():
    assert np.all(zero_crossing_rate(AudioBuffer(np.full(4096, 0.5), SR)) == 0)
    alt = np.tile([1.0, -1.0], 2048)
    assert np.allclose(zero_crossing_rate(AudioBuffer(alt, SR)), (2048 - 1) / 2048)


def test_zcr_zero_counts_as_nonnegative():
    # only 0 -> -0.5 and -0.5 -> 0 cross: 7 of the 15 pairs in a 16-sample frame
    x = np.tile([0.0, 0.5, 0.0, -0.5], 1024)
    z = zero_crossing_rate(AudioBuffer(x, SR), FrameConfig(n_fft=16, hop=16))
    assert np.allclose(z, 7 / 16)
    manual = [sum((a < 0) != (b < 0) for a, b in zip(f[:-1], f[1:])) / 16
              for f in x[:len(z) * 16].reshape(-1, 16)]
    assert np.allclose(z[:, 0], manual)


def test_zcr_of_tone():
    z = aggregate(zero_crossing_rate(tone(440, 2.0, phase=0.3)))[0]
    assert abs(z - 2 * 440 / SR) / (2 * 440 / SR) < 0.03


def test_rms_examples():
    assert np.all(rms_energy(AudioBuffer(np.zeros(4096), SR)) == 0)
    assert np.allclose(rms_energy(AudioBuffer(np.full(4096, 0.5), SR)), 0.5)
    r = aggregate(rms_energy(tone(440, 2.0, amp=0.8)))[0]
    assert abs(r - 0.8 / math.sqrt(2)) / (0.8 / math.sqrt(2)) < 0.01


def test_too_short():
    with pytest.raises(TooShort):
        rms_energy(AudioBuffer(np.zeros(100), SR))


# --- spectral shape ------------------------------------------------------

def test_centroid_single_and_pair():
    spec = _spec_from_rows([_one_bin(8), _one_bin(4) + _one_bin(12)])
    c = spectral_centroid(spec)[:, 0]
    assert c[0] == pytest.approx(spec.bin_freqs[8])
    assert c[1] == pytest.approx((spec.bin_freqs[4] + spec.bin_freqs[12]) / 2)


def test_centroid_of_tone():
    c = aggregate(spectral_centroid(power_spectrogram(tone(440, 2.0))))[0]
    assert abs(c - 440) < 15


def test_bandwidth_examples():
    spec = _spec_from_rows([_one_bin(8), _one_bin(4) + _one_bin(12)])
    bw = spectral_bandwidth(spec)[:, 0]
    assert bw[0] == pytest.approx(0.0, abs=1e-9)
    assert bw[1] == pytest.approx((spec.bin_freqs[12] - spec.bin_freqs[4]) / 2)
    with pytest.raises(InvalidOrder):
        spectral_bandwidth(spec, p=0.5)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_bandwidth_flat_against_direct_sum(p):
    K = 37
    row = np.zeros(1025)
    row[:K] = 4.0
    spec = _spec_from_rows([row])
    f = spec.bin_freqs
    mags = [math.sqrt(v) for v in row]
    total = sum(mags)
    cen = sum(fk * m for fk, m in zip(f, mags)) / total
    expected = sum((m / total) * abs(fk - cen) ** p for fk, m in zip(f, mags)) ** (1 / p)
    assert spectral_bandwidth(spec, p)[0, 0] == pytest.approx(expected, abs=1e-9)


def test_rolloff_examples():
    spec = _spec_from_rows([_one_bin(8)])
    for th in (0.1, 0.85, 1.0):
        assert spectral_rolloff(spec, th)[0, 0] == spec.bin_freqs[8]
    flat11 = np.zeros(1025)
    flat11[:11] = 1.0
    assert spectral_rolloff(_spec_from_rows([flat11]), 1.0)[0, 0] == _spec_from_rows([flat11]).bin_freqs[10]
    flat100 = np.zeros(1025)
    flat100[:100] = 1.0
    spec = _spec_from_rows([flat100])
    assert spectral_rolloff(spec, 0.85)[0, 0] == spec.bin_freqs[84]
    with pytest.raises(InvalidThreshold):
        spectral_rolloff(spec, 0.0)


def test_zero_frames_give_zero_not_nan():
    spec = _spec_from_rows([np.zeros(1025)])
    for fn in (spectral_centroid, spectral_bandwidth, spectral_rolloff, chroma_stft):
        out = fn(spec)
        assert np.all(out == 0)


# --- mel / MFCC ----------------------------------------------------------

def test_mel_scale_roundtrip():
    f = np.array([0.0, 100.0, 1000.0, 11025.0])
    assert np.allclose(mel_to_hz(hz_to_mel(f)), f)
    assert hz_to_mel(700.0) == pytest.approx(2595 * math.log10(2))


def test_filterbank_shape_and_triangles():
    fb = mel_filterbank(N_MELS, SR, 2048)
    assert fb.shape == (128, 1025)
    assert fb.min() >= 0 and fb.max() <= 1
    centers = mel_centers(N_MELS, SR)
    assert np.all(np.diff(centers) > 0)
    for row in fb:
        nz = np.flatnonzero(row)
        peak = np.argmax(row)
        # unimodal: rises to the peak then falls
        assert np.all(np.diff(row[nz[0]:peak + 1]) >= 0)
        assert np.all(np.diff(row[peak:nz[-1] + 1]) <= 0)
        assert np.sum(row == row.max()) == 1


def test_filterbank_no_coverage_gaps():
    fb = mel_filterbank(N_MELS, SR, 2048)
    freqs = np.arange(1025) * SR / 2048
    centers = mel_centers(N_MELS, SR)
    inside = (freqs > centers[0]) & (freqs < centers[-1])
    assert np.all(fb[:, inside].sum(axis=0) > 0)


def test_filterbank_direct_formula():
    sr, n_fft, n_mels = 8000, 256, 10
    fb = mel_filterbank(n_mels, sr, n_fft)
    top = 2595 * math.log10(1 + (sr / 2) / 700)
    pts = [700 * (10 ** (top * i / (n_mels + 1) / 2595) - 1) for i in range(n_mels + 2)]
    for m in range(n_mels):
        for k in range(n_fft // 2 + 1):
            f = k * sr / n_fft
            up = (f - pts[m]) / (pts[m + 1] - pts[m])
            down = (pts[m + 2] - f) / (pts[m + 2] - pts[m + 1])
            assert fb[m, k] == pytest.approx(max(0.0, min(up, down)), abs=1e-12)


def test_dct_orthonormal(rng):
    d = dct_matrix(128)
    assert np.allclose(d @ d.T, np.eye(128), atol=1e-12)
    v = rng.standard_normal(128)
    assert np.max(np.abs(d.T @ (d @ v) - v)) < 1e-9


def test_mfcc_of_silence():
    m = mfcc(power_spectrogram(AudioBuffer(np.zeros(4096), SR)))
    expected = np.zeros(20)
    expected[0] = math.sqrt(128) * math.log(1e-10)
    assert np.max(np.abs(m - expected)) < 1e-6


def test_mfcc_power_scaling(rng):
    row = rng.uniform(0.1, 1.0, 1025)
    a = mfcc(_spec_from_rows([row]))[0]
    b = mfcc(_spec_from_rows([row * 100]))[0]
    assert np.max(np.abs(a[1:] - b[1:])) < 1e-6
    assert b[0] - a[0] == pytest.approx(math.sqrt(128) * math.log(100), abs=1e-6)


# --- chroma --------------------------------------------------------------

def test_pitch_class():
    assert pitch_class([440.0, 880.0, 261.63, 27.5, 20.0]).tolist() == [9, 9, 0, 9, -1]


@pytest.mark.parametrize("f", [440.0, 880.0])
def test_chroma_tone_argmax_is_a(f):
    c = chroma_stft(power_spectrogram(tone(f, 1.0)))
    mean = c.mean(axis=0)
    assert int(np.argmax(mean)) == 9
    assert np.allclose(c[:, 9], 1.0)


def test_chroma_frames_peak_at_one(rng):
    c = chroma_stft(power_spectrogram(AudioBuffer(rng.uniform(-1, 1, 8192), SR)))
    assert np.allclose(c.max(axis=1), 1.0)


# --- aggregate / extraction ----------------------------------------------

def test_aggregate():
    assert aggregate([[1.0], [3.0]]).tolist() == [2.0]
    assert aggregate([[4.0, 5.0]]).tolist() == [4.0, 5.0]
    assert aggregate(np.full((7, 12), 0.5)).mean() == 0.5
    with pytest.raises(EmptySeries):
        aggregate(np.zeros((0, 3)))


def test_feature_vector_roundtrip():
    v = FeatureVector.from_array(np.arange(26.0))
    assert np.array_equal(v.to_array(), np.arange(26.0))
    assert list(v.as_dict()) == list(FEATURE_NAMES)
    with pytest.raises(ValueError):
        FeatureVector.from_array(np.zeros(25))


def test_whole_segment_equals_unsliced(rng):
    buf = AudioBuffer(rng.uniform(-0.5, 0.5, 3 * SR), SR)
    a = extract_feature_vector(buf)
    b = extract_feature_vector(buf, Segment(0, len(buf)))
    assert np.array_equal(a.to_array(), b.to_array())


def test_segment_equals_trimmed_copy(rng):
    x = rng.uniform(-0.5, 0.5, 4 * SR)
    buf = AudioBuffer(x, SR)
    a = extract_feature_vector(buf, Segment(1234, 50000))
    b = extract_feature_vector(AudioBuffer(x[1234:50000].copy(), SR))
    assert np.array_equal(a.to_array(), b.to_array())


def test_segment_errors():
    buf = AudioBuffer(np.zeros(SR), SR)
    with pytest.raises(EmptySegment):
        extract_feature_vector(buf, Segment(10, 10))
    with pytest.raises(TooShort):
        extract_feature_vector(buf, Segment(0, 1000))


def test_tone_feature_composition():
    v = extract_feature_vector(tone(440, 10.0, phase=0.1))
    assert abs(v.zero_crossing_rate - 0.0399) / 0.0399 < 0.03
    assert abs(v.rolloff - 440) <= 2 * SR / 2048
    spec = power_spectrogram(tone(440, 10.0, phase=0.1))
    assert int(np.argmax(chroma_stft(spec).mean(axis=0))) == 9


def test_silence_is_finite():
    v = extract_feature_vector(AudioBuffer(np.zeros(SR), SR))
    assert np.all(np.isfinite(v.to_array()))


def test_amplitude_scaling(rng):
    x = rng.uniform(-0.09, 0.09, 2 * SR)
    base = extract_feature_vector(AudioBuffer(x, SR)).to_array()
    for alpha in (0.1, 10.0):
        scaled = extract_feature_vector(AudioBuffer(alpha * x, SR)).to_array()
        invariant = [0, 2, 3, 4, 5]  # chroma, centroid, bandwidth, rolloff, zcr
        assert np.allclose(scaled[invariant], base[invariant], rtol=1e-9, atol=1e-9)
        assert scaled[1] == pytest.approx(alpha * base[1], rel=1e-12)
        assert np.max(np.abs(scaled[7:] - base[7:])) < 1e-9
        assert scaled[6] - base[6] == pytest.approx(math.sqrt(128) * math.log(alpha ** 2), abs=1e-9)


def _direct_frame_features(frame, sr):
    """Straight from the formulas: explicit DFT sum, no library helpers."""
    n = len(frame)
    w = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)
    t = np.arange(n)
    k = np.arange(n // 2 + 1)
    X = np.array([np.sum(w * frame * np.exp(-2j * np.pi * kk * t / n)) for kk in k])
    p = np.abs(X) ** 2
    f = k * sr / n
    m = np.sqrt(p)
    cen = np.sum(f * m) / np.sum(m)
    bw = np.sqrt(np.sum(m / m.sum() * (f - cen) ** 2))
    cum = np.cumsum(p)
    roll = f[np.flatnonzero(cum >= 0.85 * cum[-1])[0]]
    return p, cen, bw, roll


def test_features_match_direct_oracle():
    g = np.random.default_rng(99)
    cfg = FrameConfig(n_fft=256, hop=128)
    for _ in range(10):
        x = g.uniform(-1, 1, 1024)
        spec = power_spectrogram(AudioBuffer(x, 8000), cfg)
        cen = spectral_centroid(spec)[:, 0]
        bw = spectral_bandwidth(spec)[:, 0]
        roll = spectral_rolloff(spec)[:, 0]
        for i in range(spec.num_frames):
            p, c, b, r = _direct_frame_features(x[i * 128:i * 128 + 256], 8000)
            assert np.max(np.abs(spec.power[i] - p)) < 1e-6 * max(1.0, p.max())
            assert abs(cen[i] - c) < 1e-6
            assert abs(bw[i] - b) < 1e-6
            assert roll[i] == r
