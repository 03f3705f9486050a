"""driftmix: measure corpus divergence, plan pretraining data mixtures,
and score multi-task benchmark runs.

The heavy lifting (tokenizer training, Viterbi segmentation) sits on a
compiled kernel when available; see :mod:`driftmix.kernels`.
"""

__version__ = "0.1.0"

from driftmix.corpus import CorpusSegment, Document, FilterConfig, IngestStats, Platform

__all__ = [
    "__version__",
    "Document",
    "CorpusSegment",
    "FilterConfig",
    "IngestStats",
    "Platform",
]
