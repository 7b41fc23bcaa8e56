"""Segment policies: which part of a clip gets analysed.

A policy is declarative (``Full``, ``Head``, ``Slot``, ``TailFraction``);
:func:`resolve_segment` turns it into a half-open sample range for a
particular clip.  Times map to samples as ``round(t * sr)``.

``TailFraction(f, ref)`` is anchored to a *reference* duration, normally
the corpus-wide average clip length, not to each clip's own length: with
``ref = 180`` and ``f = 0.1`` every clip is read over 162-180 s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import EmptyManifest, EmptySegment, InvalidParams, ParseError


def seconds_to_samples(t: float, sample_rate: int) -> int:
    """Round-half-up conversion used for every policy boundary."""
    return int(math.floor(t * sample_rate + 0.5))


def _num(x: float) -> str:
    short = f"{x:g}"
    return short if float(short) == x else repr(float(x))


@dataclass(frozen=True)
class Full:
    def __str__(self):
        return "full"


@dataclass(frozen=True)
class Head:
    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise InvalidParams(f"Head duration must be > 0, got {self.duration}")

    def __str__(self):
        return f"head:{_num(self.duration)}"


@dataclass(frozen=True)
class Slot:
    start: float
    end: float

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise InvalidParams(f"Slot needs 0 <= start < end, got {self.start}-{self.end}")

    def __str__(self):
        return f"slot:{_num(self.start)}-{_num(self.end)}"


@dataclass(frozen=True)
class TailFraction:
    """Last ``fraction`` of a reference duration.

    ``reference=None`` means "not yet bound"; callers bind it with
    :func:`bind_reference` (usually to the corpus global average).
    """

    fraction: float
    reference: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise InvalidParams(f"TailFraction fraction must be in (0, 1], got {self.fraction}")
        if self.reference is not None and not self.reference > 0:
            raise InvalidParams(f"TailFraction reference must be > 0, got {self.reference}")

    def __str__(self):
        if self.reference is None:
            return f"tailfrac:{_num(self.fraction)}"
        return f"tailfrac:{_num(self.fraction)}:{_num(self.reference)}"


SegmentPolicy = Union[Full, Head, Slot, TailFraction]


@dataclass(frozen=True)
class Segment:
    start_sample: int
    end_sample: int
    clamped: bool = False

    @property
    def num_samples(self) -> int:
        return self.end_sample - self.start_sample


def resolve_segment(policy: SegmentPolicy, clip_len_samples: int, sample_rate: int) -> Segment:
    """Resolve ``policy`` against a clip of ``clip_len_samples`` samples.

    The request is intersected with ``[0, clip_len)``; ``clamped`` records
    whether that trimmed anything.  An empty intersection raises
    :class:`EmptySegment`.
    """
    n = int(clip_len_samples)
    if n < 1:
        raise EmptySegment("clip has no samples")
    if isinstance(policy, Full):
        start, end = 0, n
    elif isinstance(policy, Head):
        start, end = 0, seconds_to_samples(policy.duration, sample_rate)
    elif isinstance(policy, Slot):
        start = seconds_to_samples(policy.start, sample_rate)
        end = seconds_to_samples(policy.end, sample_rate)
    elif isinstance(policy, TailFraction):
        if policy.reference is None:
            raise InvalidParams("TailFraction has no reference duration; bind one first")
        end = seconds_to_samples(policy.reference, sample_rate)
        # length fixed at round(f * ref * sr) so adjacent rounding can't shift it
        start = end - seconds_to_samples(policy.fraction * policy.reference, sample_rate)
    else:
        raise TypeError(f"not a segment policy: {policy!r}")

    lo, hi = max(start, 0), min(end, n)
    if hi <= lo:
        raise EmptySegment(f"{policy} selects nothing from a clip of {n} samples")
    return Segment(lo, hi, clamped=(lo, hi) != (start, end))


def bind_reference(policy: SegmentPolicy, reference: float) -> SegmentPolicy:
    if isinstance(policy, TailFraction) and policy.reference is None:
        return TailFraction(policy.fraction, reference)
    return policy


def global_average_duration(manifest) -> float:
    """Mean clip duration (seconds) of a manifest or an iterable of durations."""
    entries = getattr(manifest, "entries", manifest)
    durations = [getattr(e, "duration_s", e) for e in entries]
    if not durations:
        raise EmptyManifest("manifest has no entries")
    return math.fsum(durations) / len(durations)


def parse_policy(text: str) -> SegmentPolicy:
    """Parse ``full``, ``head:S``, ``slot:A-B`` or ``tailfrac:F[:REF]``."""
    raw = text.strip().lower()
    kind, _, arg = raw.partition(":")
    try:
        if kind == "full" and not arg:
            return Full()
        if kind == "head":
            return Head(float(arg))
        if kind == "slot":
            a, sep, b = arg.partition("-")
            if not sep:
                raise ValueError
            return Slot(float(a), float(b))
        if kind == "tailfrac":
            frac, _, ref = arg.partition(":")
            return TailFraction(float(frac), float(ref) if ref else None)
    except (ValueError, InvalidParams) as exc:
        raise ParseError(f"bad policy {text!r}: {exc}") from None
    raise ParseError(f"unknown policy {text!r}")
