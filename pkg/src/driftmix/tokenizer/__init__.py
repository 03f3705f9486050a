"""Unigram-LM subword tokenizer: training, Viterbi segmentation, frequency
counting, and byte-fallback vocabulary surgery."""

from driftmix.tokenizer.normalize import META_SYMBOL, normalize
from driftmix.tokenizer.segment import Segmentation, detokenize, token_frequencies, viterbi_segment
from driftmix.tokenizer.surgery import byte_fallback_surgery
from driftmix.tokenizer.trainer import TrainParams, train_unigram
from driftmix.tokenizer.vocab import FrequencyTable, Piece, Vocabulary

__all__ = [
    "META_SYMBOL",
    "normalize",
    "Piece",
    "Vocabulary",
    "FrequencyTable",
    "Segmentation",
    "viterbi_segment",
    "detokenize",
    "token_frequencies",
    "TrainParams",
    "train_unigram",
    "byte_fallback_surgery",
]
