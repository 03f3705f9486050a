"""Byte-fallback vocabulary surgery.

Swap the 256 rarest multi-character pieces for 256 byte pieces so that any
string of text segments without ever hitting the unknown piece.  Rarity is
ranked by training log-probability; single-character pieces are exempt
because removing them could break character coverage.
"""

from __future__ import annotations

import math

import numpy as np

from driftmix.tokenizer.vocab import Piece, Vocabulary, byte_piece_text

# Byte pieces score this far (nats) below the rarest surviving piece, so a
# byte path never outbids a regular piece that covers the same characters.
_BYTE_OFFSET = -2.0

N_BYTE_PIECES = 256


def byte_fallback_surgery(vocab: Vocabulary) -> Vocabulary:
    """Replace the 256 lowest-log-prob removable pieces with byte pieces.

    Output size equals input size.  Removable means regular (not unknown,
    not already a byte) and longer than one character.
    """
    if vocab.has_byte_fallback:
        raise ValueError("vocabulary already has byte fallback pieces")
    removable = [
        (p.log_prob, p.text)
        for p in vocab.pieces
        if not p.is_special and len(p.text) >= 2
    ]
    if len(removable) < N_BYTE_PIECES:
        raise ValueError(
            f"vocabulary too small for byte surgery: {len(removable)} removable "
            f"pieces, need {N_BYTE_PIECES}"
        )
    removable.sort(key=lambda t: (t[0], t[1]))
    dropped = {text for _, text in removable[:N_BYTE_PIECES]}

    survivors = [p for p in vocab.pieces if p.is_unknown or p.text not in dropped]
    logps = np.asarray([p.log_prob for p in survivors if not p.is_special])
    m = logps.max()
    log_z = m + math.log(np.exp(logps - m).sum())
    byte_logp = float(logps.min() - log_z) + _BYTE_OFFSET

    out: list[Piece] = []
    for p in survivors:
        if p.is_unknown:
            out.append(p)
    out += [Piece(byte_piece_text(b), byte_logp, is_byte=True) for b in range(N_BYTE_PIECES)]
    out += [
        Piece(p.text, p.log_prob - log_z)
        for p in survivors
        if not p.is_special
    ]
    result = Vocabulary(pieces=tuple(out), meta_symbol=vocab.meta_symbol)
    result.check_normalized()
    return result
