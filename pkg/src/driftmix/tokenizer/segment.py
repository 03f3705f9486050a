"""Maximum-likelihood segmentation and everything layered on it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from driftmix import kernels
from driftmix.corpus import Document
from driftmix.tokenizer.normalize import normalize
from driftmix.tokenizer.vocab import FrequencyTable, Vocabulary


@dataclass(frozen=True)
class Segmentation:
    """Decoded piece ids plus the normalized text they cover.

    Concatenating the piece strings (byte pieces decoded back to characters)
    reproduces ``source_normalized`` exactly, unless an unknown piece was
    emitted.
    """

    piece_ids: tuple[int, ...]
    source_normalized: str

    def __len__(self) -> int:
        return len(self.piece_ids)

    def texts(self, vocab: Vocabulary) -> list[str]:
        return [vocab.pieces[i].text for i in self.piece_ids]


def _codes(text: str) -> np.ndarray:
    return np.fromiter((ord(c) for c in text), dtype=np.int32, count=len(text))


def viterbi_segment(vocab: Vocabulary, text: str) -> Segmentation:
    """Segment ``text`` into the highest-scoring piece sequence.

    Characters no piece can cover fall back to byte pieces when the
    vocabulary has them, otherwise each maximal uncovered span becomes one
    unknown piece.
    """
    norm = normalize(text)
    if not norm:
        return Segmentation(piece_ids=(), source_normalized="")
    lat = vocab.lattice
    trie = lat.trie
    _, ends, lattice_ids = kernels.viterbi(
        _codes(norm),
        trie.node_lo,
        trie.node_hi,
        trie.edge_char,
        trie.edge_dest,
        trie.node_piece,
        lat.log_probs,
        lat.lex_ranks,
        vocab.fallback_scores(norm),
    )
    out: list[int] = []
    pos = 0
    pending_unknown = False
    for end, pid in zip(ends, lattice_ids):
        if pid >= 0:
            if pending_unknown:
                out.append(lat.unknown_id)
                pending_unknown = False
            out.append(lat.vocab_ids[pid])
        elif lat.byte_vocab_ids is not None:
            for b in norm[pos:end].encode("utf-8"):
                out.append(lat.byte_vocab_ids[b])
        else:
            pending_unknown = True
        pos = end
    if pending_unknown:
        out.append(lat.unknown_id)
    return Segmentation(piece_ids=tuple(out), source_normalized=norm)


def detokenize(seg: Segmentation, vocab: Vocabulary) -> str:
    """Inverse of :func:`viterbi_segment` on normalized text."""
    parts: list[str] = []
    byte_buf = bytearray()

    def flush():
        if byte_buf:
            parts.append(byte_buf.decode("utf-8", errors="replace"))
            byte_buf.clear()

    for i in seg.piece_ids:
        if not 0 <= i < len(vocab.pieces):
            raise ValueError(f"piece index {i} out of range")
        p = vocab.pieces[i]
        if p.is_byte:
            byte_buf.append(int(p.text[3:5], 16))
        else:
            flush()
            parts.append(p.text)
    flush()
    return "".join(parts)


def token_frequencies(vocab: Vocabulary, corpus: Iterable[Document]) -> FrequencyTable:
    """Piece occurrence counts over the Viterbi segmentations of ``corpus``.

    Tables from disjoint shards of the same corpus merge additively with
    ``+`` to the same result.
    """
    counts: dict[str, int] = {}
    for doc in corpus:
        seg = viterbi_segment(vocab, doc.text)
        for i in seg.piece_ids:
            text = vocab.pieces[i].text
            counts[text] = counts.get(text, 0) + 1
    return FrequencyTable(vocab_id=vocab.content_id(), counts=counts)
