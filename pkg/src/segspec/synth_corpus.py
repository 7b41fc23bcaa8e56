"""Deterministic synthetic corpora that stand in for real genre datasets.

Two kinds of clip are produced:

* *structured* clips are stationary: one harmonic stack plus a bar of
  white noise repeated end to end, so any excerpt of a few bars has the
  same feature statistics as the whole;
* *unstructured* clips are a chain of contrasting stationary sections,
  joined with 50 ms linear crossfades.

The unstructured corpus layout is engineered, not observed: every clip
opens with an intro section drawn from a spec shared by all genres (so
the first seconds carry no label information), continues with variants
of its genre, and ends with an outro in the genre's own voicing that is
long enough to contain the last 10% of the clip.

All randomness comes from :class:`~segspec.rng.SplitMix64`, so corpora are
a pure function of the configuration and master seed.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer, write_wav
from .errors import InvalidSpec, ParseError
from .rng import SplitMix64, mix64

CROSSFADE_S = 0.05
AM_DEPTH = 0.3
# The noise component is one seeded bar of white noise, repeated.
NOISE_LOOP_S = 0.5
MANIFEST_COLUMNS = ("filename", "label", "duration_s", "structured", "seed")
SECTION_COLUMNS = ("filename", "index", "spec", "start_s", "end_s")


@dataclass(frozen=True)
class GenreSpec:
    name: str
    fundamentals: tuple
    harmonic_decay: float = 0.7
    noise_level: float = 0.05
    am_rate: float = 0.0
    num_harmonics: int = 6

    def validate(self):
        if not self.fundamentals:
            raise InvalidSpec(f"{self.name}: no fundamentals")
        if any(not f > 0 for f in self.fundamentals):
            raise InvalidSpec(f"{self.name}: fundamentals must be positive")
        if not 0 < self.harmonic_decay <= 1:
            raise InvalidSpec(f"{self.name}: harmonic_decay must be in (0, 1]")
        if not 0 <= self.noise_level < 1:
            raise InvalidSpec(f"{self.name}: noise_level must be in [0, 1)")
        if self.am_rate < 0 or self.num_harmonics < 1:
            raise InvalidSpec(f"{self.name}: am_rate >= 0 and num_harmonics >= 1 required")

    def transposed(self, semitones: float) -> "GenreSpec":
        ratio = 2.0 ** (semitones / 12.0)
        return replace(self, fundamentals=tuple(f * ratio for f in self.fundamentals))


# Every genre is a sub-bass drone: one strong partial below ~50 Hz (hum
# adds a weak octave) over a looped noise bed.  Concentrating the log-mel
# energy in the lowest bands keeps all 20 cepstral coefficients well away
# from zero, which relative-deviation comparisons need.  Genres differ in
# pitch class, noise level and AM rate.  AM rates are whole Hz so 3/5/10 s
# excerpts hold whole modulation periods.
GENRES = {
    "drone": GenreSpec("drone", (24.5,), 0.5, 0.001, 0.0, 1),
    "pulse": GenreSpec("pulse", (30.9,), 0.5, 0.001, 2.0, 1),
    "surf": GenreSpec("surf", (27.5,), 0.5, 0.05, 2.0, 1),
    "hum": GenreSpec("hum", (34.6,), 0.1, 0.002, 1.0, 2),
    "rumble": GenreSpec("rumble", (38.9,), 0.5, 0.001, 0.0, 1),
    "growl": GenreSpec("growl", (46.2,), 0.5, 0.001, 4.0, 1),
    "thud": GenreSpec("thud", (23.1,), 0.5, 0.05, 4.0, 1),
    "swell": GenreSpec("swell", (36.7,), 0.5, 0.001, 4.0, 1),
}

# shared by every genre; opens each unstructured clip in a contrasting register
INTRO = GenreSpec("intro", (220.0,), 0.5, 0.02, 0.0, 4)


def _render(spec: GenreSpec, n: int, sample_rate: int, rng: SplitMix64) -> np.ndarray:
    spec.validate()
    t = np.arange(n) / sample_rate
    nyquist = sample_rate / 2.0
    tone = np.zeros(n)
    for f0 in spec.fundamentals:
        phases = rng.uniform(spec.num_harmonics, 0.0, 2.0 * np.pi)
        for h in range(1, spec.num_harmonics + 1):
            if f0 * h >= nyquist:
                break
            tone += spec.harmonic_decay ** (h - 1) * np.sin(2.0 * np.pi * f0 * h * t + phases[h - 1])
    peak = np.max(np.abs(tone)) if n else 0.0
    if peak > 0:
        tone /= peak
    if spec.am_rate > 0:
        tone *= 1.0 - AM_DEPTH * (0.5 - 0.5 * np.cos(2.0 * np.pi * spec.am_rate * t))
    loop = max(1, int(round(NOISE_LOOP_S * sample_rate)))
    noise = np.resize(rng.uniform(min(loop, n), -1.0, 1.0), n) if n else np.zeros(0)
    return (1.0 - spec.noise_level) * tone + spec.noise_level * noise


def gen_structured_clip(spec: GenreSpec, duration: float, sample_rate: int = 22050, seed: int = 0) -> AudioBuffer:
    """Stationary clip: harmonic stack, optional AM, additive white noise."""
    if not duration > 0:
        raise InvalidSpec(f"duration must be > 0, got {duration}")
    n = int(round(duration * sample_rate))
    return AudioBuffer(_render(spec, n, sample_rate, SplitMix64(seed)), sample_rate)


def gen_unstructured_clip(sections, sample_rate: int = 22050, seed: int = 0) -> AudioBuffer:
    """Concatenate stationary sections with 50 ms linear crossfades.

    ``sections`` is a list of ``(GenreSpec, seconds)``.  The fades straddle
    each boundary, so the output length is exactly the summed durations.
    """
    sections = list(sections)
    if len(sections) < 2:
        raise InvalidSpec("an unstructured clip needs at least two sections")
    if any(not d > 0 for _, d in sections):
        raise InvalidSpec("section durations must be > 0")
    bounds = np.round(np.cumsum([0.0] + [d for _, d in sections]) * sample_rate).astype(int)
    n = int(bounds[-1])
    shortest = int(np.min(np.diff(bounds)))
    fade = max(1, min(int(round(CROSSFADE_S * sample_rate)), shortest // 2))
    lead = fade // 2
    ramp = (np.arange(fade) + 0.5) / fade

    out = np.zeros(n)
    for i, (spec, _) in enumerate(sections):
        lo = 0 if i == 0 else max(0, bounds[i] - lead)
        hi = n if i == len(sections) - 1 else min(n, bounds[i + 1] - lead + fade)
        gain = np.ones(hi - lo)
        if i > 0:
            gain[:fade] = ramp[:min(fade, hi - lo)]
        if i < len(sections) - 1:
            gain[-fade:] *= 1.0 - ramp
        sig = _render(spec, hi - lo, sample_rate, SplitMix64(mix64(seed, i)))
        out[lo:hi] += gain * sig
    np.clip(out, -1.0, 1.0, out=out)
    return AudioBuffer(out, sample_rate)


def _jitter(spec: GenreSpec, rng: SplitMix64, semitones: float, noise_scale: tuple) -> GenreSpec:
    noise = min(0.9, spec.noise_level * rng.scalar(*noise_scale))
    decay = float(np.clip(spec.harmonic_decay + rng.scalar(-0.05, 0.05), 0.05, 1.0))
    return replace(spec.transposed(rng.scalar(-semitones, semitones)),
                   noise_level=noise, harmonic_decay=decay)


def clip_spec(genre: GenreSpec, seed: int) -> GenreSpec:
    """Per-clip voicing of a genre: small transposition, noise and decay jitter."""
    return _jitter(genre, SplitMix64(mix64(seed, 0xC11)), 1.0, (0.8, 1.25))


def section_plan(genre: GenreSpec, duration: float, seed: int) -> list:
    """Intro (shared spec), 1-3 genre variants, outro in the genre's voicing.

    Intro covers 7-9% of the clip and the outro 15-25%, so the outro
    always contains the final tenth of the clip.
    """
    rng = SplitMix64(mix64(seed, 0x5EC))
    intro_len = duration * rng.scalar(0.07, 0.09)
    outro_len = duration * rng.scalar(0.15, 0.25)
    k = rng.integer(1, 3)
    weights = rng.uniform(k, 1.0, 2.0)
    middle = (duration - intro_len - outro_len) * weights / weights.sum()

    intro = _jitter(INTRO, rng, 0.5, (0.8, 1.25))
    plan = [(replace(intro, name="intro"), intro_len)]
    for j, d in enumerate(middle):
        variant = _jitter(genre, rng, 1.0, (0.7, 1.4))
        variant = replace(variant, name=f"{genre.name}~{j + 1}")
        plan.append((variant, float(d)))
    plan.append((replace(clip_spec(genre, seed), name=genre.name), outro_len))
    # absorb rounding so the plan sums to the requested duration
    spec, d = plan[-1]
    plan[-1] = (spec, d + duration - sum(x for _, x in plan))
    return plan


@dataclass(frozen=True)
class ManifestEntry:
    filename: str
    label: str
    duration_s: float
    structured: bool
    seed: int


@dataclass
class CorpusManifest:
    entries: list
    root: Path = field(default_factory=Path)

    @property
    def labels(self) -> list:
        return sorted({e.label for e in self.entries})

    def path_of(self, entry: ManifestEntry) -> Path:
        return self.root / entry.filename


def write_manifest(path, manifest: CorpusManifest) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_COLUMNS)
        for e in manifest.entries:
            w.writerow([e.filename, e.label, f"{e.duration_s:.9g}", int(e.structured), e.seed])


def read_manifest(path) -> CorpusManifest:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != MANIFEST_COLUMNS:
            raise ParseError(f"{path}: manifest header must be {','.join(MANIFEST_COLUMNS)}")
        try:
            entries = [
                ManifestEntry(r["filename"], r["label"], float(r["duration_s"]),
                              r["structured"].strip().lower() in ("1", "true"), int(r["seed"]))
                for r in reader
            ]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}") from None
    return CorpusManifest(entries, path.parent)


@dataclass(frozen=True)
class CorpusConfig:
    genres: tuple = ("drone", "pulse", "surf", "hum")
    clips_per_genre: int = 10
    duration_s: float = 30.0
    structured: bool = True
    master_seed: int = 0
    sample_rate: int = 22050

    def __post_init__(self):
        unknown = [g for g in self.genres if g not in GENRES]
        if unknown:
            raise InvalidSpec(f"unknown genres {unknown}; choose from {sorted(GENRES)}")
        if len(set(self.genres)) < 2 or self.clips_per_genre < 2:
            raise InvalidSpec("a corpus needs >= 2 distinct genres and >= 2 clips per genre")
        if not self.duration_s > 0 or self.sample_rate <= 0:
            raise InvalidSpec("duration_s and sample_rate must be positive")


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "structured"):
        return True
    if value in ("0", "false", "no", "unstructured"):
        return False
    raise ParseError(f"not a boolean: {text!r}")


def parse_corpus_config(text: str) -> CorpusConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Keys: ``genres`` (comma list of palette names, or a count taking the
    first N), ``clips_per_genre``, ``duration_s``, ``structured``,
    ``master_seed``, ``sample_rate``.
    """
    kwargs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep or not value:
            raise ParseError(f"line {lineno}: expected key = value")
        try:
            if key == "genres":
                if value.isdigit():
                    kwargs[key] = tuple(list(GENRES)[:int(value)])
                else:
                    kwargs[key] = tuple(g.strip() for g in value.split(",") if g.strip())
            elif key in ("clips_per_genre", "master_seed", "sample_rate"):
                kwargs[key] = int(value)
            elif key == "duration_s":
                kwargs[key] = float(value)
            elif key == "structured":
                kwargs[key] = _parse_bool(value)
            else:
                raise ParseError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return CorpusConfig(**kwargs)


def load_corpus_config(path) -> CorpusConfig:
    return parse_corpus_config(Path(path).read_text(encoding="utf-8"))


def clip_seed(master_seed: int, index: int) -> int:
    return mix64(master_seed, index)


def render_entry(entry: ManifestEntry, sample_rate: int) -> tuple:
    """Regenerate one clip (and its section plan) from its manifest entry."""
    genre = GENRES[entry.label]
    if entry.structured:
        return gen_structured_clip(clip_spec(genre, entry.seed), entry.duration_s, sample_rate, entry.seed), None
    plan = section_plan(genre, entry.duration_s, entry.seed)
    return gen_unstructured_clip(plan, sample_rate, entry.seed), plan


def gen_corpus(config: CorpusConfig, out_dir) -> CorpusManifest:
    """Write every clip as WAV plus ``manifest.csv`` (and ``sections.csv``
    for unstructured corpora) under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    section_rows = []
    index = 0
    for label in config.genres:
        for j in range(config.clips_per_genre):
            entry = ManifestEntry(f"{label}_{j:03d}.wav", label, float(config.duration_s),
                                  config.structured, clip_seed(config.master_seed, index))
            index += 1
            buf, plan = render_entry(entry, config.sample_rate)
            write_wav(out_dir / entry.filename, buf)
            entries.append(entry)
            if plan is not None:
                t = 0.0
                for k, (spec, d) in enumerate(plan):
                    section_rows.append((entry.filename, k, spec.name, f"{t:.9g}", f"{t + d:.9g}"))
                    t += d
    manifest = CorpusManifest(entries, out_dir)
    write_manifest(out_dir / "manifest.csv", manifest)
    if section_rows:
        with open(out_dir / "sections.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SECTION_COLUMNS)
            w.writerows(section_rows)
    return manifest
