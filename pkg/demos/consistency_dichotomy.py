"""
Structured versus unstructured clips
====================================

Compare features from short heads against the whole clip.  A stationary
(structured) clip gives almost the same vector from 3 s as from 30 s; a
clip whose opening differs from the rest does not.
"""

from segspec.consistency import consistency_report, structuredness_score
from segspec.segmentation import Head, TailFraction
from segspec.synth_corpus import GENRES, clip_spec, gen_structured_clip, gen_unstructured_clip, section_plan

sr = 22050
genre = GENRES["surf"]

structured = gen_structured_clip(clip_spec(genre, 1), 30.0, sr, seed=1)
report = consistency_report(structured, [Head(3), Head(5), Head(10)])
for row in report.rows:
    print("structured   %-8s max deviation %.4f" % (row.policy, row.max_deviation))
print("structuredness score:", round(structuredness_score(structured, [3, 5, 10]), 4))

# shared intro, one or more genre variants, then the genre itself at the end
plan = section_plan(genre, 60.0, seed=2)
for spec, dur in plan:
    print("  section %-8s %5.1f s  f0 %.1f Hz" % (spec.name, dur, spec.fundamentals[0]))
unstructured = gen_unstructured_clip(plan, sr, seed=2)
report = consistency_report(unstructured, [Head(5), TailFraction(0.1, 60.0)])
for row in report.rows:
    print("unstructured %-16s max deviation %.4f" % (row.policy, row.max_deviation))
