"""
The last 10% of an unstructured clip
====================================

Here the clips are built so the opening is shared by every genre and the
ending carries the genre, which makes the tail slot informative by
construction.  Head(5) should lag, while the tail slot keeps up with the
full clip at a tenth of the samples.
"""

import tempfile

from segspec.classifier import TrainConfig
from segspec.experiments import format_table, run_table2_analog
from segspec.pipeline import bench
from segspec.segmentation import Full, Head, TailFraction
from segspec.synth_corpus import CorpusConfig, gen_corpus

with tempfile.TemporaryDirectory() as tmp:
    cfg = CorpusConfig(("drone", "pulse", "surf", "hum"), 10, 90.0, structured=False)
    manifest = gen_corpus(cfg, tmp)
    policies = [Head(5.0), Full(), TailFraction(0.10, 90.0)]
    rows = run_table2_analog(manifest, policies, train_config=TrainConfig(epochs=60))
    print(format_table(rows))

    report = bench(manifest, [TailFraction(0.10)])
    print(report.text())
