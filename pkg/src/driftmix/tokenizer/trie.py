"""Flat-array trie over code points, the shape the lattice kernels consume."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PieceTrie:
    """Trie nodes flattened to parallel arrays.

    Node ``v`` owns edges ``node_lo[v]:node_hi[v]`` in ``edge_char`` /
    ``edge_dest`` (sorted by char for binary search); ``node_piece[v]`` is
    the id of the piece ending at ``v``, or -1.
    """

    node_lo: np.ndarray
    node_hi: np.ndarray
    edge_char: np.ndarray
    edge_dest: np.ndarray
    node_piece: np.ndarray

    @classmethod
    def build(cls, pieces: list[str]) -> "PieceTrie":
        """Build from piece strings; piece id == index in ``pieces``."""
        children: list[dict[int, int]] = [{}]
        terminal = [-1]
        for pid, piece in enumerate(pieces):
            node = 0
            for ch in piece:
                c = ord(ch)
                nxt = children[node].get(c)
                if nxt is None:
                    nxt = len(children)
                    children[node][c] = nxt
                    children.append({})
                    terminal.append(-1)
                node = nxt
            if terminal[node] != -1:
                raise ValueError(f"duplicate piece {piece!r}")
            terminal[node] = pid

        n = len(children)
        node_lo = np.zeros(n, dtype=np.int32)
        node_hi = np.zeros(n, dtype=np.int32)
        chars: list[int] = []
        dests: list[int] = []
        for v, kids in enumerate(children):
            node_lo[v] = len(chars)
            for c in sorted(kids):
                chars.append(c)
                dests.append(kids[c])
            node_hi[v] = len(chars)
        return cls(
            node_lo=node_lo,
            node_hi=node_hi,
            edge_char=np.asarray(chars, dtype=np.int32),
            edge_dest=np.asarray(dests, dtype=np.int32),
            node_piece=np.asarray(terminal, dtype=np.int32),
        )
