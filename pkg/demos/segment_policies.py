"""
Segment policies
================

A policy turns a clip length into the sample range that actually gets
processed.  The tail-fraction policy is anchored to a reference duration,
usually the corpus average, so on a 180 s clip the last 10% is 162-180 s.
"""

from segspec.segmentation import Full, Head, Slot, TailFraction, parse_policy, resolve_segment

sr = 22050
n = 180 * sr

for text in ["full", "head:5", "head:20", "slot:60-90", "tailfrac:0.1:180"]:
    seg = resolve_segment(parse_policy(text), n, sr)
    print("%-18s [%6.1f s, %6.1f s)  %8d samples" % (text, seg.start_sample / sr, seg.end_sample / sr,
                                                   seg.num_samples))

# a clip shorter than the reference gets the request clamped, and says so
short = resolve_segment(TailFraction(0.1, 180.0), 170 * sr, sr)
print("on a 170 s clip:", short.start_sample / sr, short.end_sample / sr, "clamped =", short.clamped)

# a head longer than the clip covers the same range as full, flagged as clamped
head, full = resolve_segment(Head(30.0), 10 * sr, sr), resolve_segment(Full(), 10 * sr, sr)
print((head.start_sample, head.end_sample) == (full.start_sample, full.end_sample), head.clamped)
print(Slot(60, 90), Head(5), TailFraction(0.1))
