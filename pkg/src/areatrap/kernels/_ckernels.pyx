# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled DP kernels; same contract and bitwise results as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

from libc.math cimport INFINITY

cnp.import_array()


cdef inline double _range_max(const double[::1] BX, const double[::1] BY,
                              const double[::1] BS, double[::1] buf,
                              Py_ssize_t lo, Py_ssize_t hi,
                              double xp, double yp, double w, double m) noexcept nogil:
    # candidates known to satisfy y <= yp; four accumulators break the
    # loop-carried dependency of the running max
    cdef double m0 = m, m1 = m, m2 = m, m3 = m, v0, v1, v2, v3
    cdef Py_ssize_t k = lo
    while k + 4 <= hi:
        v0 = BS[k] + w * (0.5 * ((xp - BX[k]) * (BY[k] + yp)))
        v1 = BS[k + 1] + w * (0.5 * ((xp - BX[k + 1]) * (BY[k + 1] + yp)))
        v2 = BS[k + 2] + w * (0.5 * ((xp - BX[k + 2]) * (BY[k + 2] + yp)))
        v3 = BS[k + 3] + w * (0.5 * ((xp - BX[k + 3]) * (BY[k + 3] + yp)))
        buf[k] = v0
        buf[k + 1] = v1
        buf[k + 2] = v2
        buf[k + 3] = v3
        m0 = v0 if v0 > m0 else m0
        m1 = v1 if v1 > m1 else m1
        m2 = v2 if v2 > m2 else m2
        m3 = v3 if v3 > m3 else m3
        k += 4
    while k < hi:
        v0 = BS[k] + w * (0.5 * ((xp - BX[k]) * (BY[k] + yp)))
        buf[k] = v0
        m0 = v0 if v0 > m0 else m0
        k += 1
    if m1 > m0:
        m0 = m1
    if m2 > m0:
        m0 = m2
    if m3 > m0:
        m0 = m3
    return m0


def weighted_dp(xs, ys, double n, double w_count, double w_area):
    X_arr = np.ascontiguousarray(xs, dtype=np.float64)
    Y_arr = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t N = X_arr.shape[0]
    S_arr = np.empty(N)
    A_arr = np.empty(N)
    pred_arr = np.empty(N, dtype=np.int64)

    # Bucket points into bands of consecutive y-rank. Every point of a lower
    # band has y <= every point of a higher band, so only the point's own
    # band needs the y test. Within a band, slots follow x order.
    cdef Py_ssize_t B = max(1, min(128, int(np.sqrt(N) / 2)))
    rank = np.empty(N, dtype=np.int64)
    rank[np.argsort(Y_arr, kind="stable")] = np.arange(N)
    band_arr = (rank * B) // max(N, 1)
    counts = np.bincount(band_arr, minlength=B)
    start_arr = np.zeros(B + 1, dtype=np.int64)
    np.cumsum(counts, out=start_arr[1:])
    pos_arr = np.empty(N, dtype=np.int64)
    fill = start_arr[:-1].copy()
    for i in range(N):
        pos_arr[i] = fill[band_arr[i]]
        fill[band_arr[i]] += 1
    BX_arr = np.empty(N)
    BY_arr = np.empty(N)
    BI_arr = np.empty(N, dtype=np.int64)
    BX_arr[pos_arr] = X_arr
    BY_arr[pos_arr] = Y_arr
    BI_arr[pos_arr] = np.arange(N)

    cdef const double[::1] X = X_arr
    cdef const double[::1] Y = Y_arr
    cdef double[::1] S = S_arr
    cdef double[::1] A = A_arr
    cdef cnp.int64_t[::1] pred = pred_arr
    cdef const cnp.int64_t[::1] band = band_arr
    cdef const cnp.int64_t[::1] start = start_arr
    cdef const cnp.int64_t[::1] pos = pos_arr
    cdef const double[::1] BX = BX_arr
    cdef const double[::1] BY = BY_arr
    cdef const cnp.int64_t[::1] BI = BI_arr
    cdef double[::1] BS = np.zeros(N)
    cdef double[::1] BA = np.zeros(N)
    cdef double[::1] buf = np.empty(N)
    cdef cnp.int64_t[::1] cnt = np.zeros(B, dtype=np.int64)

    cdef Py_ssize_t p, c, k, lo, hi, b, nb, best_q = -1, qi
    cdef double xp, yp, t, val, a, src, m = 0.0, best_a = 0.0, best_y = 0.0
    cdef bint have
    with nogil:
        for p in range(N + 1):
            if p < N:
                xp = X[p]
                yp = Y[p]
                b = band[p]
                nb = b
            else:
                xp = n
                yp = n
                b = -1
                nb = B
            t = 0.5 * ((xp - 0.0) * (0.0 + yp))
            src = 0.0 + w_area * t
            m = src
            for c in range(nb):
                lo = start[c]
                m = _range_max(BX, BY, BS, buf, lo, lo + cnt[c], xp, yp, w_area, m)
            if b >= 0:
                lo = start[b]
                hi = lo + cnt[b]
                for k in range(lo, hi):
                    if BY[k] <= yp:
                        val = BS[k] + w_area * (0.5 * ((xp - BX[k]) * (BY[k] + yp)))
                        buf[k] = val
                        if val > m:
                            m = val
                    else:
                        buf[k] = -INFINITY
                nb = b + 1
            # exact maximizers: larger area, then larger y, then smaller index
            have = src == m
            best_a = 0.0 + t
            best_y = 0.0
            best_q = -1
            for c in range(nb):
                lo = start[c]
                hi = lo + cnt[c]
                for k in range(lo, hi):
                    if buf[k] == m:
                        t = 0.5 * ((xp - BX[k]) * (BY[k] + yp))
                        a = BA[k] + t
                        qi = BI[k]
                        if (not have or a > best_a
                                or (a == best_a and (BY[k] > best_y
                                    or (BY[k] == best_y and qi < best_q)))):
                            have = True
                            best_a = a
                            best_y = BY[k]
                            best_q = qi
            if p < N:
                S[p] = m + w_count
                A[p] = best_a
                pred[p] = best_q
                k = pos[p]
                BS[k] = m + w_count
                BA[k] = best_a
                cnt[b] += 1
    return S_arr, A_arr, pred_arr, m, best_a, best_q


def exact_area_dp(xs, ys, double n, depth):
    cdef const double[::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const cnp.int64_t[::1] D = np.ascontiguousarray(depth, dtype=np.int64)
    cdef Py_ssize_t N = X.shape[0]
    cdef Py_ssize_t L = int(np.max(depth)) if N else 0
    G_arr = np.full((N, L + 1), -np.inf)
    P_arr = np.full((N, L + 1), -2, dtype=np.int64)
    sG_arr = np.full(L + 1, -np.inf)
    sP_arr = np.full(L + 1, -2, dtype=np.int64)
    cdef double[:, ::1] G = G_arr
    cdef cnp.int64_t[:, ::1] P = P_arr
    cdef double[::1] sG = sG_arr
    cdef cnp.int64_t[::1] sP = sP_arr
    cdef double[::1] row
    cdef cnp.int64_t[::1] prow
    cdef double[::1] by_ = np.empty(L + 1)
    cdef Py_ssize_t p, q, k, cols, off, kq
    cdef double xp, yp, t, v, yq
    with nogil:
        for p in range(N + 1):
            if p < N:
                xp = X[p]
                yp = Y[p]
                cols = D[p]
                row = G[p]
                prow = P[p]
                off = 1
            else:
                xp = n
                yp = n
                cols = L + 1
                row = sG
                prow = sP
                off = 0
            # source: arrive holding 0 points
            row[off] = 0.0 + 0.5 * ((xp - 0.0) * (0.0 + yp))
            prow[off] = -1
            by_[0] = 0.0
            for q in range(p):
                yq = Y[q]
                if yq <= yp:
                    t = 0.5 * ((xp - X[q]) * (yq + yp))
                    kq = D[q] + 1
                    if kq > cols:
                        kq = cols
                    for k in range(1, kq):
                        v = G[q, k] + t
                        if v > row[k + off] or (v == row[k + off] and yq > by_[k]):
                            row[k + off] = v
                            prow[k + off] = q
                            by_[k] = yq
    return G_arr, P_arr, sG_arr, sP_arr
