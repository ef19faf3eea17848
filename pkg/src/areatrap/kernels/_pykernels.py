"""Pure numpy implementations of the DP kernels.

These are the reference for the compiled kernels in ``_ckernels.pyx``: both
evaluate the same floating-point expressions in the same order and apply the
same tie-breaks, so their outputs are bitwise identical.

Points must be sorted by (x, then y). A point q can precede p iff q comes
earlier in that order and y_q <= y_p. Index -1 denotes the source (0,0).
"""

import numpy as np


def weighted_dp(xs, ys, n, w_count, w_area):
    """Maximize ``w_count * |path| + w_area * area`` over increasing paths.

    Score ties go to larger accumulated area, then to the predecessor with
    larger y, then to the earliest candidate (source first).

    Returns ``(S, A, pred, sink_score, sink_area, sink_pred)``.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    N = xs.size
    S = np.empty(N)
    A = np.empty(N)
    pred = np.empty(N, dtype=np.int64)
    for p in range(N + 1):
        if p < N:
            xp, yp = xs[p], ys[p]
            idx = np.flatnonzero(ys[:p] <= yp)
        else:
            xp = yp = float(n)
            idx = np.arange(N)
        t0 = 0.5 * ((xp - 0.0) * (0.0 + yp))
        t = 0.5 * ((xp - xs[idx]) * (ys[idx] + yp))
        val = np.concatenate(([0.0 + w_area * t0], S[idx] + w_area * t))
        a = np.concatenate(([0.0 + t0], A[idx] + t))
        qy = np.concatenate(([0.0], ys[idx]))
        # lexicographic max of (score, area, y); first occurrence wins
        take = val == val.max()
        take &= a == a[take].max()
        take &= qy == qy[take].max()
        j = int(np.flatnonzero(take)[0])
        q = -1 if j == 0 else int(idx[j - 1])
        if p < N:
            S[p] = val[j] + w_count
            A[p] = a[j]
            pred[p] = q
        else:
            return S, A, pred, float(val[j]), float(a[j]), q


def exact_area_dp(xs, ys, n, depth):
    """Maximum trapped area over paths with exactly ``l`` points.

    ``depth[p]`` is the longest chain ending at p (so row p is finite exactly
    on columns 1..depth[p]). Area ties go to the predecessor with larger y,
    then to the earliest candidate.

    Returns ``(G, P, sink_G, sink_P)``; ``G[p, l]`` is -inf where no path
    exists, ``P`` holds predecessor indices (-1 source, -2 none).
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    depth = np.ascontiguousarray(depth, dtype=np.int64)
    N = xs.size
    L = int(depth.max()) if N else 0
    G = np.full((N, L + 1), -np.inf)
    P = np.full((N, L + 1), -2, dtype=np.int64)
    sink_G = np.full(L + 1, -np.inf)
    sink_P = np.full(L + 1, -2, dtype=np.int64)
    for p in range(N + 1):
        if p < N:
            xp, yp = xs[p], ys[p]
            idx = np.flatnonzero(ys[:p] <= yp)
            # column k: arrive from a state holding k points
            cols = int(depth[p])
        else:
            xp = yp = float(n)
            idx = np.arange(N)
            cols = L + 1
        src = np.full((1, cols), -np.inf)
        src[0, 0] = 0.0 + 0.5 * ((xp - 0.0) * (0.0 + yp))
        body = G[idx, 0:cols] + (0.5 * ((xp - xs[idx]) * (ys[idx] + yp)))[:, None]
        cand = np.vstack((src, body))
        cy = np.concatenate(([0.0], ys[idx]))
        crow = np.concatenate(([-1], idx))
        m = cand.max(axis=0)
        j = np.argmax(np.where(cand == m, cy[:, None], -np.inf), axis=0)
        ok = m > -np.inf
        if p < N:
            G[p, 1:cols + 1] = np.where(ok, m, -np.inf)
            P[p, 1:cols + 1] = np.where(ok, crow[j], -2)
        else:
            sink_G[:] = np.where(ok, m, -np.inf)
            sink_P[:] = np.where(ok, crow[j], -2)
    return G, P, sink_G, sink_P
