"""
Spectrogram as a greyscale image
================================

Render a two-tone clip as a PGM image: low frequencies at the bottom, time
left to right, 80 dB of range mapped onto 0-255.
"""

import os
import tempfile

import numpy as np

from segspec import AudioBuffer
from segspec.audio_io import write_wav
from segspec.pipeline import decode_pgm, write_spectrogram

sr = 22050
t = np.arange(2 * sr) / sr
x = np.where(t < 1.0, np.sin(2 * np.pi * 440 * t), np.sin(2 * np.pi * 1760 * t)) * 0.5

with tempfile.TemporaryDirectory() as tmp:
    wav = os.path.join(tmp, "two_tones.wav")
    pgm = os.path.join(tmp, "two_tones.pgm")
    write_wav(wav, AudioBuffer(x, sr))
    write_spectrogram(wav, pgm)
    with open(pgm, "rb") as fh:
        img = decode_pgm(fh.read())

print("image rows x cols:", img.shape)
rows = np.argmax(img, axis=0)
bins = img.shape[0] - 1 - rows
print("brightest bin, first column: %d (%.0f Hz)" % (bins[0], bins[0] * sr / 2048))
print("brightest bin, last column:  %d (%.0f Hz)" % (bins[-1], bins[-1] * sr / 2048))
