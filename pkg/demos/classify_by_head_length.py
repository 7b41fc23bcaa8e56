"""
Does the head length matter on stationary clips?
================================================

Synthesize a small structured corpus, then extract, train and evaluate once
per head duration.  On stationary audio the accuracies should barely move.
"""

import tempfile

from segspec.classifier import TrainConfig
from segspec.experiments import format_table, max_accuracy_gap, run_table1_analog
from segspec.synth_corpus import CorpusConfig, gen_corpus

with tempfile.TemporaryDirectory() as tmp:
    manifest = gen_corpus(CorpusConfig(("drone", "pulse", "surf", "hum"), 15, 30.0), tmp)
    rows = run_table1_analog(manifest, train_config=TrainConfig(epochs=60))

print(format_table(rows))
print("max accuracy gap: %.3f" % max_accuracy_gap(rows))
