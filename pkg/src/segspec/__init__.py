"""Segment-aware audio feature extraction and genre classification.

Compute a 26-value spectral summary (chroma, RMS, centroid, bandwidth,
roll-off, ZCR, 20 MFCCs) over a chosen part of each clip, check how far it
drifts from the full-clip summary, and train a small classifier on the
resulting tables.
"""
from .audio_io import AudioBuffer, quantize, read_wav, write_wav
from .classifier import FeatureTable, MlpModel, TrainConfig, evaluate, forward, load_model, save_model, train
from .consistency import consistency_report, emit_plot_data, is_structured, relative_deviation, structuredness_score
from .dsp import FrameConfig, Spectrogram, dft_naive, fft_real, frame_signal, hann_window, power_spectrogram
from .errors import SegspecError
from .features import FEATURE_NAMES, FeatureVector, extract_feature_vector
from .segmentation import Full, Head, Segment, Slot, TailFraction, global_average_duration, parse_policy, resolve_segment
from .synth_corpus import (GENRES, CorpusConfig, CorpusManifest, GenreSpec, gen_corpus, gen_structured_clip,
                           gen_unstructured_clip, read_manifest, section_plan)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer", "quantize", "read_wav", "write_wav",
    "FeatureTable", "MlpModel", "TrainConfig", "evaluate", "forward", "load_model", "save_model", "train",
    "consistency_report", "emit_plot_data", "is_structured", "relative_deviation", "structuredness_score",
    "FrameConfig", "Spectrogram", "dft_naive", "fft_real", "frame_signal", "hann_window", "power_spectrogram",
    "SegspecError",
    "FEATURE_NAMES", "FeatureVector", "extract_feature_vector",
    "Full", "Head", "Segment", "Slot", "TailFraction", "global_average_duration", "parse_policy", "resolve_segment",
    "GENRES", "CorpusConfig", "CorpusManifest", "GenreSpec", "gen_corpus", "gen_structured_clip",
    "gen_unstructured_clip", "read_manifest", "section_plan",
]
