# SPDX-License-Identifier: Apache-2.0
"""Chromosome sub-structure tokenization, pattern mining and abnormality detection."""
import json

from . import _kseq
from ._kseq import (
    EOC,
    SOC,
    KseqError,
    __version__,
    class_bands,
    edit_distance,
    fpgrowth,
    generate_chromosome,
    generate_dataset,
    longitudinal_axis,
    mine_subsequences,
    pareto_front,
    positional_encoding,
)

KseqError.code = property(lambda self: self.args[0])


def _config(config):
    return json.dumps(config) if config else ""


def fit_vocabulary(manifest, config=None):
    """Cluster model (as a dict) fitted on every image in the manifest."""
    return json.loads(_kseq.fit_vocabulary(str(manifest), _config(config)))


def tokenize(pixels, model, mask=None, config=None):
    """(interior tokens, positions) for one chromosome image."""
    return _kseq.tokenize(pixels, mask, json.dumps(model), _config(config))


def run_experiment(manifest, config=None):
    """Split, fit, tokenize, mine, train and score; returns a dict of results."""
    return json.loads(_kseq.run_experiment(str(manifest), _config(config)))


def classify(interior, bank):
    """(label, edit distance) of the nearest class canonical sequence."""
    return _kseq.classify(list(interior), json.dumps(bank))


def detect(interior, bank, predicted_class, threshold=0.0):
    return _kseq.detect(list(interior), json.dumps(bank), predicted_class, threshold)


__all__ = [
    "EOC",
    "SOC",
    "KseqError",
    "__version__",
    "class_bands",
    "classify",
    "detect",
    "edit_distance",
    "fit_vocabulary",
    "fpgrowth",
    "generate_chromosome",
    "generate_dataset",
    "longitudinal_axis",
    "mine_subsequences",
    "pareto_front",
    "positional_encoding",
    "run_experiment",
    "tokenize",
]
