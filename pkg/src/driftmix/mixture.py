"""Two-corpus pretraining mixtures: schedules, input packing, span corruption.

Throughout, ``ratio_sm`` is the target fraction of the in-domain corpus in
the overall token budget, and steps are 1-indexed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence


class ScheduleKind(str, Enum):
    STATIC = "static"
    SEQUENTIAL = "sequential"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class MixSchedule:
    """Assigns every pretraining step an in-domain (SM) batch fraction.

    * static: every step carries ``ratio_sm``.
    * sequential: out-of-domain only for the first ``boundary`` steps, then
      in-domain only; the step right after the boundary absorbs the
      fractional remainder so the mean stays exactly ``ratio_sm``.
    * dynamic: linear ramp from max(0, 2r-1) to min(1, 2r), mean ``ratio_sm``.
    """

    kind: ScheduleKind
    ratio_sm: float
    total_steps: int

    @property
    def boundary(self) -> int:
        """Last all-out-of-domain step of a sequential schedule."""
        if self.kind is not ScheduleKind.SEQUENTIAL:
            raise ValueError("boundary is defined for sequential schedules only")
        # epsilon guards float noise when (1-r)*T is mathematically integral
        return math.floor((1.0 - self.ratio_sm) * self.total_steps + 1e-9)

    def fraction(self, step: int) -> float:
        """In-domain fraction of the batch at ``step``."""
        if not 1 <= step <= self.total_steps:
            raise ValueError(f"step {step} outside 1..{self.total_steps}")
        r = self.ratio_sm
        t = self.total_steps
        if self.kind is ScheduleKind.STATIC:
            return r
        if self.kind is ScheduleKind.SEQUENTIAL:
            b = self.boundary
            if step <= b:
                return 0.0
            if step == b + 1:
                return min(1.0, b + 1 - (1.0 - r) * t)
            return 1.0
        if t == 1:
            return r
        lo = max(0.0, 2.0 * r - 1.0)
        hi = min(1.0, 2.0 * r)
        return lo + (hi - lo) * (step - 1) / (t - 1)


def make_schedule(kind: ScheduleKind | str, ratio_sm: float, total_steps: int) -> MixSchedule:
    if not 0.0 <= ratio_sm <= 1.0:
        raise ValueError(f"ratio_sm must be in [0, 1], got {ratio_sm}")
    if total_steps < 1:
        raise ValueError("total_steps must be >= 1")
    return MixSchedule(kind=ScheduleKind(kind), ratio_sm=ratio_sm, total_steps=total_steps)


def batch_counts(sched: MixSchedule, step: int, batch_size: int) -> tuple[int, int]:
    """(out-of-domain, in-domain) example counts for one batch.

    Largest-remainder rounding of fraction*batch_size; remainder ties go to
    the in-domain side.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    x = sched.fraction(step) * batch_size
    n_sm = math.floor(x)
    if x - n_sm >= 0.5:
        n_sm += 1
    n_sm = min(n_sm, batch_size)
    return batch_size - n_sm, n_sm


@dataclass(frozen=True)
class PackedSequence:
    """Several examples concatenated into one sequence of <= max_len tokens.

    ``boundaries[k]`` is the offset where the k-th packed example starts;
    ``pad_count`` is the padding a fixed-length consumer would append.
    """

    token_ids: tuple[int, ...]
    boundaries: tuple[int, ...]
    pad_count: int


def pack(examples: Iterable[Sequence[int]], max_len: int) -> Iterator[PackedSequence]:
    """Greedily pack examples, in arrival order, into max_len-sized sequences.

    Examples longer than ``max_len`` are split at ``max_len`` first; otherwise
    examples are atomic.  A sequence is emitted when the next example no
    longer fits.  No token is lost or duplicated.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    buf: list[int] = []
    bounds: list[int] = []

    def emit() -> PackedSequence:
        seq = PackedSequence(
            token_ids=tuple(buf),
            boundaries=tuple(bounds),
            pad_count=max_len - len(buf),
        )
        buf.clear()
        bounds.clear()
        return seq

    for example in examples:
        chunks = [example[i : i + max_len] for i in range(0, len(example), max_len)]
        for chunk in chunks:
            if len(buf) + len(chunk) > max_len:
                yield emit()
            bounds.append(len(buf))
            buf.extend(chunk)
    if buf:
        yield emit()


# ----------------------------------------------------------- span corruption

# Sentinels live above any real token id so their relative order is plain.
SENTINEL_BASE = 1 << 30


def sentinel_id(k: int) -> int:
    return SENTINEL_BASE + k


def is_sentinel(token: int) -> bool:
    return token >= SENTINEL_BASE


@dataclass(frozen=True)
class CorruptedExample:
    """Denoising pair: inputs with sentinel-masked spans, targets listing
    each sentinel's removed span, closed by one final sentinel."""

    inputs: tuple[int, ...]
    targets: tuple[int, ...]


def span_corrupt(
    tokens: Sequence[int],
    noise_density: float = 0.15,
    mean_span: float = 3.0,
    seed: int = 0,
) -> CorruptedExample:
    """Replace non-adjacent token spans with ordered sentinels.

    The corrupted token count is round(noise_density * len(tokens)), split
    into roughly count/mean_span spans of random positive sizes placed
    uniformly with at least one real token between consecutive spans.  When
    the rounded count is zero the example passes through with no sentinels.
    """
    n = len(tokens)
    if n < 2:
        raise ValueError("need at least 2 tokens")
    if not 0.0 < noise_density < 1.0:
        raise ValueError("noise_density must be in (0, 1)")
    if mean_span <= 0.0:
        raise ValueError("mean_span must be positive")
    for t in tokens:
        if not 0 <= t < SENTINEL_BASE:
            raise ValueError(f"token id {t} outside [0, {SENTINEL_BASE})")

    m = math.floor(noise_density * n + 0.5)
    if m == 0:
        return CorruptedExample(inputs=tuple(tokens), targets=())
    rng = random.Random(seed)

    k = max(1, math.floor(m / mean_span + 0.5))
    k = min(k, m)            # spans are non-empty
    k = min(k, n - m + 1)    # k-1 separator tokens must fit

    # span sizes: random composition of m into k positive parts
    cuts = sorted(rng.sample(range(1, m), k - 1)) if k > 1 else []
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [m])]

    # gaps: k-1 mandatory separators, the rest spread uniformly over k+1 slots
    free = n - m - (k - 1)
    marks = sorted(rng.sample(range(free + k), k)) if k > 0 else []
    parts = [b - a - 1 for a, b in zip([-1] + marks, marks + [free + k])]
    gaps = [parts[0]] + [g + 1 for g in parts[1:-1]] + ([parts[-1]] if k > 0 else [])

    inputs: list[int] = []
    targets: list[int] = []
    pos = 0
    for j, size in enumerate(sizes):
        inputs.extend(tokens[pos : pos + gaps[j]])
        pos += gaps[j]
        inputs.append(sentinel_id(j))
        targets.append(sentinel_id(j))
        targets.extend(tokens[pos : pos + size])
        pos += size
    inputs.extend(tokens[pos:])
    targets.append(sentinel_id(k))
    return CorruptedExample(inputs=tuple(inputs), targets=tuple(targets))


def splice(inputs: Sequence[int], targets: Sequence[int]) -> list[int]:
    """Reconstruct the original tokens from a corrupted pair."""
    spans: dict[int, list[int]] = {}
    current: list[int] | None = None
    for t in targets:
        if is_sentinel(t):
            current = spans.setdefault(t, [])
        elif current is None:
            raise ValueError("targets must start with a sentinel")
        else:
            current.append(t)
    out: list[int] = []
    for t in inputs:
        if is_sentinel(t):
            if t not in spans:
                raise ValueError(f"input sentinel {t} missing from targets")
            out.extend(spans[t])
        else:
            out.append(t)
    return out
