"""Unigram-LM vocabulary training.

Pipeline: seed a large candidate inventory (all covered single characters
plus frequent substrings found by a suffix-array pass), fit piece
probabilities by EM over the segmentation lattice, then repeatedly prune the
pieces whose removal costs the least likelihood until the requested size is
reached.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from driftmix import kernels
from driftmix.corpus import Document
from driftmix.tokenizer.normalize import normalize
from driftmix.tokenizer.trie import PieceTrie
from driftmix.tokenizer.vocab import UNKNOWN_TEXT, Piece, Vocabulary, reserved_text

# Train-time score of a below-coverage character edge, relative to the
# smallest seed log-probability; constant across rounds so per-round
# likelihoods stay comparable.
_UNK_OFFSET = -10.0

# Pieces whose expected count falls below this are starved: single-character
# pieces are pinned near the bottom of the distribution (coverage must
# survive), everything else becomes prune fodder.
_HEALTHY_COUNT = 0.5
_STARVED_OFFSET = -5.0


@dataclass(frozen=True)
class TrainParams:
    max_piece_length: int = 16
    seed_size_factor: int = 8
    em_iterations_per_round: int = 2
    prune_factor: float = 0.75
    character_coverage: float = 0.9995
    min_seed_count: int = 2
    max_seed_chars: int = 1_000_000
    max_sentences: int | None = None
    seed: int = 0


@dataclass
class RoundStats:
    """Bookkeeping for one EM+prune round (consumed by tests/diagnostics)."""

    size_start: int
    em_nll: list[float]
    pruned: int
    prune_loss_estimate: float
    size_end: int


def train_unigram(
    corpus: Iterable[Document],
    target_size: int,
    params: TrainParams = TrainParams(),
) -> Vocabulary:
    """Train a unigram vocabulary of exactly ``target_size`` pieces."""
    vocab, _ = train_unigram_with_stats(corpus, target_size, params)
    return vocab


def train_unigram_with_stats(
    corpus: Iterable[Document],
    target_size: int,
    params: TrainParams = TrainParams(),
) -> tuple[Vocabulary, list[RoundStats]]:
    sentences = _normalized_sentences(corpus, params)
    weighted = list(Counter(sentences).items())

    char_counts: Counter[str] = Counter()
    for sent, w in weighted:
        for ch in sent:
            char_counts[ch] += w
    required = _covered_chars(char_counts, params.character_coverage)

    min_feasible = len(required) + 1
    if target_size < min_feasible:
        raise ValueError(
            f"target_size {target_size} is below the minimum feasible size "
            f"{min_feasible} ({len(required)} covered characters + 1 special)"
        )
    target_lattice = target_size - 1

    pieces = sorted(required)
    single_counts, substrings = _seed_candidates(weighted, required, params, target_size)
    scores = [float(single_counts.get(c, 1)) for c in pieces]
    for text, count in substrings:
        pieces.append(text)
        scores.append(float(count * len(text)))
    if len(pieces) < target_lattice:
        raise ValueError(
            f"corpus yields only {len(pieces)} seed pieces; "
            f"target_size {target_size} is not reachable"
        )
    logps = np.log(np.asarray(scores) / sum(scores))
    unk_score = float(logps.min()) + _UNK_OFFSET

    sent_codes = [
        (np.fromiter(map(ord, s), dtype=np.int32, count=len(s)), float(w))
        for s, w in weighted
    ]

    rounds: list[RoundStats] = []
    while True:
        size_start = len(pieces)
        trie = PieceTrie.build(pieces)
        ranks = _lex_ranks(pieces)
        em_nll = []
        for _ in range(params.em_iterations_per_round):
            counts, nll = _expected_counts(sent_codes, trie, logps, unk_score)
            em_nll.append(nll)
            logps = _mstep(counts)
        if len(pieces) <= target_lattice:
            rounds.append(RoundStats(size_start, em_nll, 0, 0.0, len(pieces)))
            break
        new_size = max(target_lattice, math.ceil(len(pieces) * params.prune_factor))
        pieces, logps, n_pruned, est_loss = _prune(
            sent_codes, pieces, logps, trie, ranks, unk_score, new_size, params
        )
        rounds.append(RoundStats(size_start, em_nll, n_pruned, est_loss, len(pieces)))

    # digamma log-weights do not sum to one; normalize for the final model
    m = float(logps.max())
    logps = logps - (m + math.log(np.exp(logps - m).sum()))
    order = sorted(range(len(pieces)), key=lambda i: (-logps[i], pieces[i]))
    final = [Piece(UNKNOWN_TEXT, 0.0, is_unknown=True)]
    final += [Piece(pieces[i], float(logps[i])) for i in order]
    vocab = Vocabulary(pieces=tuple(final))
    vocab.check_normalized()
    return vocab, rounds


# ------------------------------------------------------------------ corpus prep


def _normalized_sentences(corpus: Iterable[Document], params: TrainParams) -> list[str]:
    sentences = [s for s in (normalize(doc.text) for doc in corpus) if s]
    if not sentences:
        raise ValueError("corpus is empty after normalization")
    cap = params.max_sentences
    if cap is not None and len(sentences) > cap:
        rng = random.Random(params.seed)
        for i in range(cap):
            j = rng.randrange(i, len(sentences))
            sentences[i], sentences[j] = sentences[j], sentences[i]
        sentences = sentences[:cap]
    return sentences


def _covered_chars(char_counts: Counter, coverage: float) -> set[str]:
    total = sum(char_counts.values())
    ordered = sorted(char_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    kept: set[str] = set()
    cum = 0
    for ch, cnt in ordered:
        if kept and cum >= coverage * total:
            break
        kept.add(ch)
        cum += cnt
    return kept


# ------------------------------------------------------------------ seeding


def _suffix_array(codes: np.ndarray) -> np.ndarray:
    """Prefix-doubling suffix array over an int array."""
    n = len(codes)
    rank = np.unique(codes, return_inverse=True)[1].astype(np.int64)
    k = 1
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        if k < n:
            key2[:-k] = rank[k:]
        order = np.lexsort((key2, rank))
        r1 = rank[order]
        r2 = key2[order]
        change = np.ones(n, dtype=bool)
        change[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new_rank = np.cumsum(change) - 1
        if new_rank[-1] == n - 1:
            return order
        rank = np.empty(n, dtype=np.int64)
        rank[order] = new_rank
        k <<= 1


def _lcp_array(codes: list[int], sa: np.ndarray) -> list[int]:
    """Kasai LCP; lcp[r] = common prefix length of suffixes sa[r-1] and sa[r]."""
    n = len(sa)
    rank = [0] * n
    sal = sa.tolist()
    for r, i in enumerate(sal):
        rank[i] = r
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sal[r - 1]
            while i + h < n and j + h < n and codes[i + h] == codes[j + h]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    return lcp


def _lcp_nodes(sa: np.ndarray, lcp: list[int]) -> Iterator[tuple[int, int, int]]:
    """Yield (text_pos, depth, count) for every LCP-interval node, i.e. every
    right-maximal repeated substring."""
    n = len(sa)
    stack: list[tuple[int, int]] = []
    for k in range(1, n + 1):
        cur = lcp[k] if k < n else 0
        left = k - 1
        while stack and stack[-1][0] > cur:
            depth, l = stack.pop()
            yield int(sa[l]), depth, k - l
            left = l
        if cur > 0 and (not stack or stack[-1][0] < cur):
            stack.append((cur, left))


def _seed_candidates(
    weighted: list[tuple[str, int]],
    required: set[str],
    params: TrainParams,
    target_size: int,
) -> tuple[Counter, list[tuple[str, int]]]:
    """Single-char counts plus the most frequent repeated substrings.

    Both are counted over the same deduplicated-corpus concatenation so seed
    scores are commensurable; substrings are scored by count*length.
    """
    codes: list[int] = []
    sep = -1
    for sent, _w in weighted:
        if codes and len(codes) + len(sent) + 1 > params.max_seed_chars:
            break
        codes.extend(map(ord, sent))
        codes.append(sep)  # unique separators keep repeats within sentences
        sep -= 1
    single_counts = Counter(chr(c) for c in codes if c >= 0)

    arr = np.asarray(codes, dtype=np.int64)
    sa = _suffix_array(arr)
    lcp = _lcp_array(codes, sa)

    req_codes = {ord(c) for c in required}
    best: dict[str, int] = {}
    for pos, depth, count in _lcp_nodes(sa, lcp):
        if count < params.min_seed_count:
            continue
        length = min(depth, params.max_piece_length)
        if length < 2:
            continue
        span = codes[pos : pos + length]
        if any(c not in req_codes for c in span):
            continue
        text = "".join(map(chr, span))
        if reserved_text(text):
            continue
        if count > best.get(text, 0):
            best[text] = count
    ordered = sorted(best.items(), key=lambda kv: (-kv[1] * len(kv[0]), kv[0]))
    cap = max(0, params.seed_size_factor * target_size - len(required))
    return single_counts, ordered[:cap]


# ------------------------------------------------------------------ EM + prune


def _lex_ranks(pieces: list[str]) -> np.ndarray:
    ranks = np.zeros(len(pieces), dtype=np.int32)
    for r, i in enumerate(sorted(range(len(pieces)), key=lambda j: pieces[j])):
        ranks[i] = r
    return ranks


def _digamma(x: float) -> float:
    r = 0.0
    while x < 6.0:
        r -= 1.0 / x
        x += 1.0
    f = 1.0 / (x * x)
    return r + math.log(x) - 0.5 / x - f * (
        1 / 12.0 - f * (1 / 120.0 - f * (1 / 252.0 - f * (1 / 240.0 - f / 132.0)))
    )


def _mstep(counts: np.ndarray) -> np.ndarray:
    """Bayesianified maximization: exp(logp) ~ exp(digamma(c)) / exp(digamma(total)).

    The digamma transform starves low-count pieces faster than a plain
    count/total update, which is what lets frequent short pieces win over
    rare long ones.  Starved pieces are floored a fixed offset below the
    weakest healthy piece so lattice scores stay bounded.
    """
    total = float(counts.sum())
    dg_total = _digamma(total)
    healthy = counts >= _HEALTHY_COUNT
    if not healthy.any():
        raise ValueError("EM collapsed: no piece has positive expected count")
    logps = np.empty(len(counts))
    for i, c in enumerate(counts):
        if c >= _HEALTHY_COUNT:
            logps[i] = _digamma(float(c)) - dg_total
    floor = logps[healthy].min() + _STARVED_OFFSET
    logps[~healthy] = floor
    return logps


def _expected_counts(sent_codes, trie, logps, unk_score) -> tuple[np.ndarray, float]:
    counts = np.zeros(len(logps))
    nll = 0.0
    for codes, w in sent_codes:
        fb = np.full(len(codes), unk_score)
        z, _ = kernels.lattice_counts(
            codes, trie.node_lo, trie.node_hi, trie.edge_char, trie.edge_dest,
            trie.node_piece, logps, fb, w, counts,
        )
        nll -= w * z
    return counts, nll


def _viterbi_usage(sent_codes, trie, logps, ranks, unk_score) -> np.ndarray:
    freq = np.zeros(len(logps))
    for codes, w in sent_codes:
        fb = np.full(len(codes), unk_score)
        _, _, pids = kernels.viterbi(
            codes, trie.node_lo, trie.node_hi, trie.edge_char, trie.edge_dest,
            trie.node_piece, logps, ranks, fb,
        )
        for p in pids:
            if p >= 0:
                freq[p] += w
    return freq


def _alt_score(text: str, logp_by_text: dict[str, float], max_len: int) -> float:
    """Best segmentation score of ``text`` using the other pieces."""
    n = len(text)
    neg_inf = float("-inf")
    dp = [neg_inf] * (n + 1)
    dp[0] = 0.0
    for i in range(n):
        if dp[i] == neg_inf:
            continue
        for j in range(i + 1, min(i + max_len, n) + 1):
            if i == 0 and j == n:
                continue  # the full span could only be the piece itself
            sub = text[i:j]
            lp = logp_by_text.get(sub)
            if lp is not None and dp[i] + lp > dp[j]:
                dp[j] = dp[i] + lp
    return dp[n]


def _prune(sent_codes, pieces, logps, trie, ranks, unk_score, new_size, params):
    """Drop the pieces whose removal least increases the corpus NLL."""
    freq = _viterbi_usage(sent_codes, trie, logps, ranks, unk_score)
    logp_by_text = dict(zip(pieces, logps.tolist()))
    losses = []
    for i, text in enumerate(pieces):
        if len(text) < 2:
            continue  # single characters guarantee coverage
        if freq[i] == 0.0:
            losses.append((0.0, text, i))
            continue
        alt = _alt_score(text, logp_by_text, params.max_piece_length)
        loss = float("inf") if alt == float("-inf") else freq[i] * (logps[i] - alt)
        losses.append((loss, text, i))
    losses.sort(key=lambda t: (t[0], t[1]))
    n_remove = min(len(pieces) - new_size, len(losses))
    drop = {i for _, _, i in losses[:n_remove]}
    est = sum(l for l, _, _ in losses[:n_remove])
    kept = [i for i in range(len(pieces)) if i not in drop]
    new_pieces = [pieces[i] for i in kept]
    new_logps = logps[kept]
    m = new_logps.max()
    new_logps = new_logps - (m + math.log(np.exp(new_logps - m).sum()))
    return new_pieces, new_logps, n_remove, float(est)
