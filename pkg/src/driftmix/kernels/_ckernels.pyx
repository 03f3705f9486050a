# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled lattice kernels; semantics mirror ``_pykernels`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log1p

cnp.import_array()

BACKEND = "cython"

cdef double NEG_INF = -float("inf")


cdef inline double _lae(double a, double b) nogil:
    cdef double t
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        t = a
        a = b
        b = t
    return a + log1p(exp(b - a))


def viterbi(codes, node_lo, node_hi, edge_char, edge_dest, node_piece, piece_logp, piece_rank, fallback_scores):
    """See ``_pykernels.viterbi``."""
    cdef cnp.int32_t[::1] codes_v = np.ascontiguousarray(codes, dtype=np.int32)
    cdef cnp.int32_t[::1] lo_v = np.ascontiguousarray(node_lo, dtype=np.int32)
    cdef cnp.int32_t[::1] hi_v = np.ascontiguousarray(node_hi, dtype=np.int32)
    cdef cnp.int32_t[::1] ech_v = np.ascontiguousarray(edge_char, dtype=np.int32)
    cdef cnp.int32_t[::1] edst_v = np.ascontiguousarray(edge_dest, dtype=np.int32)
    cdef cnp.int32_t[::1] npc_v = np.ascontiguousarray(node_piece, dtype=np.int32)
    cdef cnp.float64_t[::1] logp_v = np.ascontiguousarray(piece_logp, dtype=np.float64)
    cdef cnp.int32_t[::1] rank_v = np.ascontiguousarray(piece_rank, dtype=np.int32)
    cdef cnp.float64_t[::1] fb_v = np.ascontiguousarray(fallback_scores, dtype=np.float64)

    cdef int n = codes_v.shape[0]
    if n == 0:
        return 0.0, [], []

    score_arr = np.zeros(n + 1, dtype=np.float64)
    count_arr = np.zeros(n + 1, dtype=np.int32)
    cpiece_arr = np.full(n + 1, -2, dtype=np.int32)
    cend_arr = np.zeros(n + 1, dtype=np.int32)
    cdef cnp.float64_t[::1] score = score_arr
    cdef cnp.int32_t[::1] count = count_arr
    cdef cnp.int32_t[::1] cpiece = cpiece_arr
    cdef cnp.int32_t[::1] cend = cend_arr

    cdef int fb_rank = logp_v.shape[0]
    cdef int i, k, node, lo, hi, mid, nxt, p, cnt, r, bc, br, bp, be, ec, c
    cdef double s, bs

    with nogil:
        for i in range(n - 1, -1, -1):
            bs = NEG_INF
            bc = 0
            br = 0
            bp = -2
            be = 0
            node = 0
            k = i
            while k < n:
                c = codes_v[k]
                lo = lo_v[node]
                hi = hi_v[node]
                nxt = -1
                while lo < hi:
                    mid = (lo + hi) >> 1
                    ec = ech_v[mid]
                    if ec == c:
                        nxt = edst_v[mid]
                        break
                    elif ec < c:
                        lo = mid + 1
                    else:
                        hi = mid
                if nxt < 0:
                    break
                node = nxt
                k += 1
                p = npc_v[node]
                if p >= 0:
                    s = logp_v[p] + score[k]
                    cnt = count[k] + 1
                    r = rank_v[p]
                    if bp == -2 or s > bs or (s == bs and (cnt < bc or (cnt == bc and r < br))):
                        bs = s
                        bc = cnt
                        br = r
                        bp = p
                        be = k
            s = fb_v[i] + score[i + 1]
            cnt = count[i + 1] + 1
            if bp == -2 or s > bs or (s == bs and (cnt < bc or (cnt == bc and fb_rank < br))):
                bs = s
                bc = cnt
                br = fb_rank
                bp = -1
                be = i + 1
            score[i] = bs
            count[i] = bc
            cpiece[i] = bp
            cend[i] = be

    ends = []
    pieces = []
    i = 0
    while i < n:
        ends.append(cend_arr[i].item())
        pieces.append(cpiece_arr[i].item())
        i = cend_arr[i]
    return score_arr[0].item(), ends, pieces


def lattice_counts(codes, node_lo, node_hi, edge_char, edge_dest, node_piece, piece_logp, fallback_scores, double weight, counts):
    """See ``_pykernels.lattice_counts``."""
    cdef cnp.int32_t[::1] codes_v = np.ascontiguousarray(codes, dtype=np.int32)
    cdef cnp.int32_t[::1] lo_v = np.ascontiguousarray(node_lo, dtype=np.int32)
    cdef cnp.int32_t[::1] hi_v = np.ascontiguousarray(node_hi, dtype=np.int32)
    cdef cnp.int32_t[::1] ech_v = np.ascontiguousarray(edge_char, dtype=np.int32)
    cdef cnp.int32_t[::1] edst_v = np.ascontiguousarray(edge_dest, dtype=np.int32)
    cdef cnp.int32_t[::1] npc_v = np.ascontiguousarray(node_piece, dtype=np.int32)
    cdef cnp.float64_t[::1] logp_v = np.ascontiguousarray(piece_logp, dtype=np.float64)
    cdef cnp.float64_t[::1] fb_v = np.ascontiguousarray(fallback_scores, dtype=np.float64)
    cdef cnp.float64_t[::1] counts_v = counts

    cdef int n = codes_v.shape[0]
    cdef int nv = logp_v.shape[0]
    if n == 0:
        return 0.0, 0.0

    alpha_arr = np.full(n + 1, NEG_INF, dtype=np.float64)
    beta_arr = np.full(n + 1, NEG_INF, dtype=np.float64)
    local_arr = np.zeros(nv, dtype=np.float64)
    cdef cnp.float64_t[::1] alpha = alpha_arr
    cdef cnp.float64_t[::1] beta = beta_arr
    cdef cnp.float64_t[::1] local = local_arr

    cdef int i, k, node, lo, hi, mid, nxt, p, ec, c
    cdef double a, b, z, fb_mass = 0.0

    with nogil:
        alpha[0] = 0.0
        for i in range(n):
            a = alpha[i]
            node = 0
            k = i
            while k < n:
                c = codes_v[k]
                lo = lo_v[node]
                hi = hi_v[node]
                nxt = -1
                while lo < hi:
                    mid = (lo + hi) >> 1
                    ec = ech_v[mid]
                    if ec == c:
                        nxt = edst_v[mid]
                        break
                    elif ec < c:
                        lo = mid + 1
                    else:
                        hi = mid
                if nxt < 0:
                    break
                node = nxt
                k += 1
                p = npc_v[node]
                if p >= 0:
                    alpha[k] = _lae(alpha[k], a + logp_v[p])
            alpha[i + 1] = _lae(alpha[i + 1], a + fb_v[i])

        beta[n] = 0.0
        for i in range(n - 1, -1, -1):
            b = NEG_INF
            node = 0
            k = i
            while k < n:
                c = codes_v[k]
                lo = lo_v[node]
                hi = hi_v[node]
                nxt = -1
                while lo < hi:
                    mid = (lo + hi) >> 1
                    ec = ech_v[mid]
                    if ec == c:
                        nxt = edst_v[mid]
                        break
                    elif ec < c:
                        lo = mid + 1
                    else:
                        hi = mid
                if nxt < 0:
                    break
                node = nxt
                k += 1
                p = npc_v[node]
                if p >= 0:
                    b = _lae(b, logp_v[p] + beta[k])
            beta[i] = _lae(b, fb_v[i] + beta[i + 1])

        z = alpha[n]
        for i in range(n):
            a = alpha[i]
            node = 0
            k = i
            while k < n:
                c = codes_v[k]
                lo = lo_v[node]
                hi = hi_v[node]
                nxt = -1
                while lo < hi:
                    mid = (lo + hi) >> 1
                    ec = ech_v[mid]
                    if ec == c:
                        nxt = edst_v[mid]
                        break
                    elif ec < c:
                        lo = mid + 1
                    else:
                        hi = mid
                if nxt < 0:
                    break
                node = nxt
                k += 1
                p = npc_v[node]
                if p >= 0:
                    local[p] += exp(a + logp_v[p] + beta[k] - z)
            fb_mass += exp(a + fb_v[i] + beta[i + 1] - z)

        for p in range(nv):
            if local[p] != 0.0:
                counts_v[p] += weight * local[p]

    return z, weight * fb_mass
