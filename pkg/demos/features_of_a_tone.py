"""
Features of a pure tone
=======================

Frame a 440 Hz tone, check the FFT against the direct DFT, and print the
26-value feature vector a classifier would see.
"""

import numpy as np

from segspec import AudioBuffer, extract_feature_vector
from segspec.dsp import FrameConfig, dft_naive, fft_real, power_spectrogram

sr = 22050
t = np.arange(2 * sr) / sr
buf = AudioBuffer(0.5 * np.sin(2 * np.pi * 440 * t), sr)

# the radix-2 FFT agrees with the O(n^2) DFT on any power-of-two frame
frame = buf.samples[:64]
print("fft vs dft max error:", np.max(np.abs(fft_real(frame) - dft_naive(frame))))

spec = power_spectrogram(buf, FrameConfig(n_fft=2048, hop=512))
print("spectrogram frames x bins:", spec.power.shape)
peak_bin = int(np.argmax(spec.power.mean(axis=0)))
print("peak bin %d -> %.1f Hz" % (peak_bin, peak_bin * sr / 2048))

# ZCR should sit near 2f/sr, RMS near A/sqrt(2), centroid near 440 Hz
vec = extract_feature_vector(buf)
for name, value in list(vec.as_dict().items())[:6]:
    print("%-20s %.6g" % (name, value))
print("expected zcr %.6g, rms %.6g" % (2 * 440 / sr, 0.5 / np.sqrt(2)))
