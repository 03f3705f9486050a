"""Token-distribution divergence between corpus segments.

Two frequency tables are aligned over the union of their token sets, zeros
replaced by a small probability floor (the usual practice for population
stability index computations, which would otherwise be infinite), and
compared with the symmetric KL divergence and the Jaccard distance of the
token sets.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from driftmix.corpus import Document, Platform
from driftmix.tokenizer.vocab import FrequencyTable

MAX_FLOOR = 1e-3
DEFAULT_FLOOR = 1e-6


class Band(str, Enum):
    """Rule-of-thumb interpretation bands for symmetric KL values."""

    LITTLE = "little"
    MODERATE = "moderate"
    SIGNIFICANT = "significant"


@dataclass(frozen=True)
class AlignedDistributions:
    """Two probability vectors over the union of two token sets."""

    tokens: tuple[str, ...]
    p: np.ndarray
    q: np.ndarray
    floor: float
    intersection_size: int
    union_size: int


@dataclass(frozen=True)
class DivergenceReport:
    skl: float
    jaccard: float
    i: int
    u: int
    band: Band

    def to_json_dict(self) -> dict:
        return {
            "skl": self.skl,
            "jaccard": self.jaccard,
            "i": self.i,
            "u": self.u,
            "band": self.band.value,
        }


@dataclass(frozen=True)
class DriftSeries:
    """Divergence reports between adjacent segments, chronological order."""

    pairs: tuple[tuple[str, str, DivergenceReport], ...]

    def to_csv(self) -> str:
        lines = ["from,to,skl,jaccard"]
        for a, b, rep in self.pairs:
            lines.append(f"{a},{b},{rep.skl!r},{rep.jaccard!r}")
        return "\n".join(lines) + "\n"


def align_union(
    fa: FrequencyTable, fb: FrequencyTable, floor: float = DEFAULT_FLOOR
) -> AlignedDistributions:
    """Token-union alignment of two frequency tables.

    Each side becomes count/total with zero entries replaced by ``floor``,
    then renormalized to sum to one.
    """
    if not 0.0 < floor <= MAX_FLOOR:
        raise ValueError(f"floor must be in (0, {MAX_FLOOR}], got {floor}")
    a = fa.nonzero_tokens()
    b = fb.nonzero_tokens()
    if not a or not b:
        raise ValueError("cannot align an empty frequency table")
    tokens = tuple(sorted(a | b))

    def vec(table: FrequencyTable) -> np.ndarray:
        v = np.array([table.counts.get(t, 0) / table.total for t in tokens])
        v[v == 0.0] = floor
        return v / v.sum()

    return AlignedDistributions(
        tokens=tokens,
        p=vec(fa),
        q=vec(fb),
        floor=floor,
        intersection_size=len(a & b),
        union_size=len(tokens),
    )


def skl(d: AlignedDistributions) -> float:
    """Symmetric KL divergence sum((p - q) * ln(p / q)), in nats."""
    return float(np.sum((d.p - d.q) * np.log(d.p / d.q)))


def jaccard(d: AlignedDistributions) -> float:
    """Jaccard distance of the two token sets: 1 - i/u."""
    if d.union_size < 1:
        raise ValueError("union is empty")
    return 1 - d.intersection_size / d.union_size


def classify_skl(value: float) -> Band:
    """Band a symmetric KL value: <0.1 little, 0.1..0.25 moderate, else significant."""
    if value < 0:
        raise ValueError(f"SKL cannot be negative, got {value}")
    if value < 0.1:
        return Band.LITTLE
    if value <= 0.25:
        return Band.MODERATE
    return Band.SIGNIFICANT


def compare_tables(
    fa: FrequencyTable, fb: FrequencyTable, floor: float = DEFAULT_FLOOR
) -> DivergenceReport:
    """Full report for one pair of tables."""
    d = align_union(fa, fb, floor)
    s = skl(d)
    return DivergenceReport(
        skl=s,
        jaccard=jaccard(d),
        i=d.intersection_size,
        u=d.union_size,
        band=classify_skl(s),
    )


def drift(
    tables: Sequence[tuple[str, FrequencyTable]], floor: float = DEFAULT_FLOOR
) -> DriftSeries:
    """Divergence between each adjacent pair of chronologically ordered tables."""
    if len(tables) < 2:
        raise ValueError("drift needs at least two segments")
    labels = [label for label, _ in tables]
    if labels != sorted(labels):
        raise ValueError(f"segment labels not in chronological order: {labels}")
    pairs = []
    for (la, fa), (lb, fb) in zip(tables, tables[1:]):
        pairs.append((la, lb, compare_tables(fa, fb, floor)))
    return DriftSeries(pairs=tuple(pairs))


# ------------------------------------------------------------- synthetic data


def synthetic_drift_corpus(
    months: Sequence[str],
    docs_per_month: int = 300,
    words_per_doc: int = 12,
    lexicon_size: int = 120,
    replace_rate: float = 0.05,
    seed: int = 0,
    platform: Platform = Platform.GENERIC,
) -> list[Document]:
    """Generate a corpus whose lexicon churns month over month.

    Each month, ``replace_rate`` of the word lexicon is swapped for fresh
    unseen words; documents sample the current lexicon with a mildly skewed
    distribution.  Useful for exercising the drift pipeline end to end —
    doubling ``replace_rate`` roughly doubles the month-to-month divergence.
    """
    if not 0.0 <= replace_rate <= 1.0:
        raise ValueError("replace_rate must be in [0, 1]")
    rng = random.Random(seed)
    minted = 0

    def new_word() -> str:
        nonlocal minted
        letters = "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(6))
        minted += 1
        return f"{letters}{minted:04d}"

    lexicon = [new_word() for _ in range(lexicon_size)]
    weights = [1.0 / (r + 1) for r in range(lexicon_size)]
    docs: list[Document] = []
    n_swap = round(replace_rate * lexicon_size)
    for m, label in enumerate(months):
        if m > 0 and n_swap:
            for idx in sorted(rng.sample(range(lexicon_size), n_swap)):
                lexicon[idx] = new_word()
        year, month = label.split("-")
        ts = datetime(int(year), int(month), 15, 12, 0, 0, tzinfo=timezone.utc)
        for _ in range(docs_per_month):
            words = rng.choices(lexicon, weights=weights, k=words_per_doc)
            docs.append(Document(text=" ".join(words), timestamp=ts, platform=platform))
    return docs
