import numpy as np
import pytest

from segspec.audio_io import AudioBuffer

SR = 22050

# (criterion number, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE_RESULTS = []


def tone(freq, seconds=1.0, sr=SR, amp=0.5, phase=0.0):
    t = np.arange(int(round(seconds * sr))) / sr
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t + phase), sr)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"AC{num:<2} {'PASS' if ok else 'FAIL'}  {detail}")
