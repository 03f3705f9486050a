"""Pure-Python lattice kernels (fallback twin of ``_ckernels``).

Both implementations must stay interchangeable: same candidate iteration
order and tie-breaking, so Viterbi paths are identical; float sums agree to
rounding noise.  The parity suite (tests/test_kernels.py) holds them to that.

Lattice encoding
----------------
The piece inventory is a trie over code points, flattened to arrays:
``node_lo[v]:node_hi[v]`` indexes the node's outgoing edges inside
``edge_char``/``edge_dest`` (sorted by char), ``node_piece[v]`` is the piece
id terminating at ``v`` (-1 if none).  Every position additionally has a
single-character fallback edge with score ``fallback_scores[i]`` (unknown
penalty, or the byte-encoding score when a byte inventory exists); fallback
edges carry piece id -1.
"""

import math

NEG_INF = float("-inf")

BACKEND = "python"


def _logaddexp(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def _match_lists(codes, node_lo, node_hi, edge_char, edge_dest, node_piece):
    """Per-position list of (end, piece_id) trie matches."""
    n = len(codes)
    out = []
    for i in range(n):
        node = 0
        k = i
        row = []
        while k < n:
            c = codes[k]
            lo = node_lo[node]
            hi = node_hi[node]
            nxt = -1
            while lo < hi:
                mid = (lo + hi) // 2
                ec = edge_char[mid]
                if ec == c:
                    nxt = edge_dest[mid]
                    break
                if ec < c:
                    lo = mid + 1
                else:
                    hi = mid
            if nxt < 0:
                break
            node = nxt
            k += 1
            p = node_piece[node]
            if p >= 0:
                row.append((k, p))
        out.append(row)
    return out


def viterbi(codes, node_lo, node_hi, edge_char, edge_dest, node_piece, piece_logp, piece_rank, fallback_scores):
    """Best-scoring segmentation of ``codes`` into piece/fallback edges.

    Ties break toward fewer pieces, then lowest ``piece_rank`` (lexicographic
    rank of the piece string; fallback edges rank after every real piece).

    Returns ``(score, ends, pieces)`` where ``ends[t]``/``pieces[t]`` give the
    end offset and piece id (-1 for fallback) of the t-th edge on the path.
    """
    codes = list(codes)
    node_lo = list(node_lo)
    node_hi = list(node_hi)
    edge_char = list(edge_char)
    edge_dest = list(edge_dest)
    node_piece = list(node_piece)
    piece_logp = list(piece_logp)
    piece_rank = list(piece_rank)
    fallback_scores = list(fallback_scores)

    n = len(codes)
    if n == 0:
        return 0.0, [], []
    matches = _match_lists(codes, node_lo, node_hi, edge_char, edge_dest, node_piece)
    fb_rank = len(piece_logp)
    score = [0.0] * (n + 1)
    count = [0] * (n + 1)
    choice_piece = [-2] * (n + 1)
    choice_end = [0] * (n + 1)

    for i in range(n - 1, -1, -1):
        bs = NEG_INF
        bc = 0
        br = 0
        bp = -2
        be = 0
        for k, p in matches[i]:
            s = piece_logp[p] + score[k]
            cnt = count[k] + 1
            r = piece_rank[p]
            if bp == -2 or s > bs or (s == bs and (cnt < bc or (cnt == bc and r < br))):
                bs, bc, br, bp, be = s, cnt, r, p, k
        s = fallback_scores[i] + score[i + 1]
        cnt = count[i + 1] + 1
        if bp == -2 or s > bs or (s == bs and (cnt < bc or (cnt == bc and fb_rank < br))):
            bs, bc, br, bp, be = s, cnt, fb_rank, -1, i + 1
        score[i] = bs
        count[i] = bc
        choice_piece[i] = bp
        choice_end[i] = be

    ends = []
    pieces = []
    i = 0
    while i < n:
        ends.append(choice_end[i])
        pieces.append(choice_piece[i])
        i = choice_end[i]
    return score[0], ends, pieces


def lattice_counts(codes, node_lo, node_hi, edge_char, edge_dest, node_piece, piece_logp, fallback_scores, weight, counts):
    """Forward-backward over the segmentation lattice.

    Adds ``weight``-scaled expected piece counts into ``counts`` (indexed by
    piece id) and returns ``(loglik, fallback_mass)``; ``loglik`` is the
    *unweighted* log marginal of this sentence, ``fallback_mass`` the weighted
    expected count of fallback edges.
    """
    codes = list(codes)
    node_lo = list(node_lo)
    node_hi = list(node_hi)
    edge_char = list(edge_char)
    edge_dest = list(edge_dest)
    node_piece = list(node_piece)
    piece_logp = list(piece_logp)
    fallback_scores = list(fallback_scores)

    n = len(codes)
    if n == 0:
        return 0.0, 0.0
    matches = _match_lists(codes, node_lo, node_hi, edge_char, edge_dest, node_piece)

    alpha = [NEG_INF] * (n + 1)
    alpha[0] = 0.0
    for i in range(n):
        a = alpha[i]
        for k, p in matches[i]:
            alpha[k] = _logaddexp(alpha[k], a + piece_logp[p])
        alpha[i + 1] = _logaddexp(alpha[i + 1], a + fallback_scores[i])

    beta = [NEG_INF] * (n + 1)
    beta[n] = 0.0
    for i in range(n - 1, -1, -1):
        b = NEG_INF
        for k, p in matches[i]:
            b = _logaddexp(b, piece_logp[p] + beta[k])
        beta[i] = _logaddexp(b, fallback_scores[i] + beta[i + 1])

    z = alpha[n]
    local = [0.0] * len(piece_logp)
    fb_mass = 0.0
    for i in range(n):
        a = alpha[i]
        for k, p in matches[i]:
            local[p] += math.exp(a + piece_logp[p] + beta[k] - z)
        fb_mass += math.exp(a + fallback_scores[i] + beta[i + 1] - z)
    for p, v in enumerate(local):
        if v:
            counts[p] += weight * v
    return z, weight * fb_mass
