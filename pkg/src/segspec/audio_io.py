"""PCM16 mono WAV reading/writing and the in-memory audio buffer."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IoError, MalformedWav, UnsupportedFormat

PCM_FORMAT_TAG = 1
# Full-scale divisor on read and write: -32768 <-> -1.0 exactly.
FULL_SCALE = 32768.0


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono signal with its sample rate.

    Samples are stored as a read-only float64 array in ``[-1, 1]``.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64, copy=True).reshape(-1)
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        if samples.size and not (np.all(np.isfinite(samples)) and np.max(np.abs(samples)) <= 1.0):
            raise ValueError("samples must be finite and lie in [-1, 1]")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate

    def slice(self, start: int, end: int) -> "AudioBuffer":
        return AudioBuffer(self.samples[start:end], self.sample_rate)


def quantize(samples: np.ndarray) -> np.ndarray:
    """Map unit-range floats to int16, rounding half away from zero."""
    scaled = np.asarray(samples, dtype=np.float64) * FULL_SCALE
    rounded = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    return np.clip(rounded, -32768, 32767).astype("<i2")


def read_wav(path) -> AudioBuffer:
    """Read a PCM16 mono RIFF/WAVE file.

    Chunks other than ``fmt `` and ``data`` are skipped.  The data chunk
    must be fully present; a declared length longer than the bytes on
    disk raises :class:`MalformedWav`.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise MalformedWav(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body_start = pos + 8
        body_end = body_start + size
        if body_end > len(raw):
            raise MalformedWav(
                f"{path}: chunk {chunk_id!r} declares {size} bytes, "
                f"only {len(raw) - body_start} available")
        if chunk_id == b"fmt ":
            if size < 16:
                raise MalformedWav(f"{path}: fmt chunk too short ({size} bytes)")
            fmt = struct.unpack_from("<HHIIHH", raw, body_start)
        elif chunk_id == b"data":
            data = raw[body_start:body_end]
        # chunks are word aligned
        pos = body_end + (size & 1)
    if fmt is None:
        raise MalformedWav(f"{path}: missing fmt chunk")
    if data is None:
        raise MalformedWav(f"{path}: missing data chunk")

    tag, channels, sample_rate, _, _, bits = fmt
    if tag != PCM_FORMAT_TAG or bits != 16:
        raise UnsupportedFormat(f"{path}: need PCM 16-bit, got format {tag} with {bits} bits")
    if channels != 1:
        raise UnsupportedFormat(f"{path}: need mono, got {channels} channels")
    if sample_rate <= 0:
        raise MalformedWav(f"{path}: sample rate {sample_rate}")
    if len(data) % 2:
        raise MalformedWav(f"{path}: odd data chunk length {len(data)}")

    ints = np.frombuffer(data, dtype="<i2")
    return AudioBuffer(ints.astype(np.float64) / FULL_SCALE, sample_rate)


def encode_wav(buf: AudioBuffer) -> bytes:
    """Serialize ``buf`` as a minimal PCM16 mono WAV (fmt + data only)."""
    payload = quantize(buf.samples).tobytes()
    sr = buf.sample_rate
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, PCM_FORMAT_TAG, 1, sr, sr * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


def write_wav(path, buf: AudioBuffer) -> None:
    data = encode_wav(buf)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
