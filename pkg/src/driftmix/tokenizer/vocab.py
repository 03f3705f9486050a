"""Vocabulary and frequency-table types plus their on-disk formats."""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from driftmix.tokenizer.normalize import META_SYMBOL
from driftmix.tokenizer.trie import PieceTrie

UNKNOWN_TEXT = "<unk>"
_BYTE_RE = re.compile(r"<0x([0-9A-Fa-f]{2})>\Z")

# Decode-time score of an unknown-character edge.  Far below any real path
# difference, so unknown edges are taken only when nothing else covers a char.
UNK_SCORE = -1.0e9

# Probability sum over regular pieces must stay this close to 1.
PROB_SUM_TOL = 1e-6


def byte_piece_text(value: int) -> str:
    return f"<0x{value:02X}>"


def reserved_text(text: str) -> bool:
    """True for surface forms reserved by the serialization format."""
    return text == UNKNOWN_TEXT or bool(_BYTE_RE.fullmatch(text))


@dataclass(frozen=True)
class Piece:
    text: str
    log_prob: float
    is_byte: bool = False
    is_unknown: bool = False

    @property
    def is_special(self) -> bool:
        return self.is_byte or self.is_unknown


@dataclass(frozen=True)
class _LatticeTables:
    """Kernel-ready arrays derived from a Vocabulary."""

    trie: PieceTrie
    log_probs: np.ndarray          # float64 over lattice pieces
    lex_ranks: np.ndarray          # int32 over lattice pieces
    vocab_ids: list[int]           # lattice id -> vocabulary index
    byte_vocab_ids: list[int] | None   # byte value -> vocabulary index
    byte_log_probs: np.ndarray | None  # float64[256]
    unknown_id: int | None


@dataclass(frozen=True)
class Vocabulary:
    """Ordered subword inventory with per-piece log-probabilities.

    Regular pieces form a probability distribution (sum of exp(log_prob) is
    1 within tolerance); byte and unknown pieces sit outside it.  Exactly one
    unknown piece is required unless a full 256-piece byte inventory makes it
    unreachable.
    """

    pieces: tuple[Piece, ...]
    meta_symbol: str = META_SYMBOL

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("vocabulary has no pieces")
        seen = set()
        n_bytes = 0
        n_unknown = 0
        for p in self.pieces:
            if not p.text:
                raise ValueError("empty piece text")
            if p.text in seen:
                raise ValueError(f"duplicate piece {p.text!r}")
            seen.add(p.text)
            if p.is_byte:
                n_bytes += 1
                if not _BYTE_RE.fullmatch(p.text):
                    raise ValueError(f"byte piece with non-byte text {p.text!r}")
            elif p.is_unknown:
                n_unknown += 1
                if p.text != UNKNOWN_TEXT:
                    raise ValueError(f"unknown piece must be {UNKNOWN_TEXT!r}")
            else:
                if p.text == UNKNOWN_TEXT or _BYTE_RE.fullmatch(p.text):
                    raise ValueError(f"reserved piece text {p.text!r}")
                if not (math.isfinite(p.log_prob) and p.log_prob <= 0.0):
                    raise ValueError(f"piece {p.text!r} has invalid log_prob {p.log_prob}")
        if n_bytes not in (0, 256):
            raise ValueError(f"byte inventory must have 0 or 256 pieces, got {n_bytes}")
        if n_bytes == 0 and n_unknown != 1:
            raise ValueError("exactly one unknown piece required without byte fallback")
        if n_unknown > 1:
            raise ValueError("more than one unknown piece")
        if len(self.meta_symbol) != 1:
            raise ValueError("meta symbol must be a single character")

    @property
    def target_size(self) -> int:
        return len(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    @cached_property
    def piece_index(self) -> dict[str, int]:
        return {p.text: i for i, p in enumerate(self.pieces)}

    @cached_property
    def has_byte_fallback(self) -> bool:
        return any(p.is_byte for p in self.pieces)

    def regular_pieces(self) -> list[Piece]:
        return [p for p in self.pieces if not p.is_special]

    def prob_sum(self) -> float:
        return float(sum(math.exp(p.log_prob) for p in self.pieces if not p.is_special))

    def check_normalized(self):
        s = self.prob_sum()
        if abs(s - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"piece probabilities sum to {s}, expected 1")

    @cached_property
    def lattice(self) -> _LatticeTables:
        texts = []
        logps = []
        vocab_ids = []
        byte_ids: list[int] = [-1] * 256
        byte_logps = np.zeros(256)
        unknown_id = None
        for i, p in enumerate(self.pieces):
            if p.is_byte:
                value = int(_BYTE_RE.fullmatch(p.text).group(1), 16)
                byte_ids[value] = i
                byte_logps[value] = p.log_prob
            elif p.is_unknown:
                unknown_id = i
            else:
                texts.append(p.text)
                logps.append(p.log_prob)
                vocab_ids.append(i)
        order = sorted(range(len(texts)), key=lambda j: texts[j])
        ranks = np.zeros(len(texts), dtype=np.int32)
        for r, j in enumerate(order):
            ranks[j] = r
        has_bytes = any(b >= 0 for b in byte_ids)
        return _LatticeTables(
            trie=PieceTrie.build(texts),
            log_probs=np.asarray(logps, dtype=np.float64),
            lex_ranks=ranks,
            vocab_ids=vocab_ids,
            byte_vocab_ids=byte_ids if has_bytes else None,
            byte_log_probs=byte_logps if has_bytes else None,
            unknown_id=unknown_id,
        )

    def fallback_scores(self, text: str) -> np.ndarray:
        """Per-character fallback edge scores for ``text``."""
        lat = self.lattice
        if lat.byte_log_probs is None:
            return np.full(len(text), UNK_SCORE)
        out = np.empty(len(text))
        for i, ch in enumerate(text):
            out[i] = sum(lat.byte_log_probs[b] for b in ch.encode("utf-8"))
        return out

    # ---------------------------------------------------------------- io

    def dumps(self) -> str:
        lines = [f"#unigram v1 size={len(self.pieces)} meta={self.meta_symbol}"]
        for p in self.pieces:
            lines.append(f"{p.text}\t{p.log_prob!r}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path):
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, data: str) -> "Vocabulary":
        lines = data.splitlines()
        if not lines or not lines[0].startswith("#unigram v1 "):
            raise ValueError("not a unigram vocabulary file")
        header = dict(kv.split("=", 1) for kv in lines[0][len("#unigram v1 "):].split())
        meta = header.get("meta", META_SYMBOL)
        pieces = []
        for ln in lines[1:]:
            if not ln:
                continue
            text, lp = ln.split("\t")
            pieces.append(
                Piece(
                    text=text,
                    log_prob=float(lp),
                    is_byte=bool(_BYTE_RE.fullmatch(text)),
                    is_unknown=text == UNKNOWN_TEXT,
                )
            )
        vocab = cls(pieces=tuple(pieces), meta_symbol=meta)
        if int(header.get("size", len(pieces))) != len(pieces):
            raise ValueError("header size does not match piece count")
        return vocab

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    def content_id(self) -> str:
        return hashlib.sha256(self.dumps().encode("utf-8")).hexdigest()[:12]

    @classmethod
    def from_pieces(
        cls,
        scored: Iterable[tuple[str, float]],
        meta_symbol: str = META_SYMBOL,
        add_unknown: bool = True,
    ) -> "Vocabulary":
        """Build from (text, log_prob) pairs; handy for tests and tools."""
        pieces = [Piece(UNKNOWN_TEXT, 0.0, is_unknown=True)] if add_unknown else []
        pieces += [Piece(text, lp) for text, lp in scored]
        return cls(pieces=tuple(pieces), meta_symbol=meta_symbol)


@dataclass(frozen=True)
class FrequencyTable:
    """Token counts for one corpus segment under one vocabulary."""

    vocab_id: str
    counts: Mapping[str, int]
    total: int = field(default=-1)

    def __post_init__(self):
        s = 0
        for token, c in self.counts.items():
            if c < 0:
                raise ValueError(f"negative count for {token!r}")
            s += c
        if self.total == -1:
            object.__setattr__(self, "total", s)
        elif self.total != s:
            raise ValueError(f"total {self.total} != sum of counts {s}")

    def nonzero_tokens(self) -> set[str]:
        return {t for t, c in self.counts.items() if c > 0}

    def __add__(self, other: "FrequencyTable") -> "FrequencyTable":
        if self.vocab_id != other.vocab_id:
            raise ValueError("cannot merge tables built under different vocabularies")
        merged = dict(self.counts)
        for t, c in other.counts.items():
            merged[t] = merged.get(t, 0) + c
        return FrequencyTable(vocab_id=self.vocab_id, counts=merged)

    def to_json_dict(self) -> dict:
        return {
            "vocab_id": self.vocab_id,
            "total": self.total,
            "counts": {t: c for t, c in sorted(self.counts.items())},
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FrequencyTable":
        return cls(vocab_id=obj["vocab_id"], counts=dict(obj["counts"]), total=obj.get("total", -1))
