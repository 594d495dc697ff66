"""Compiled hot loops for the sphere-walk chain.

Layout and reduction contract
-----------------------------
Positions are carried coordinate-major, shape (dim, n_points), so the
inner loops run contiguously over points and auto-vectorize.  Walks are
grouped into fixed-size reduction blocks; each block accumulates its
trajectories in index order with compensated summation and writes one
partial sum per point.  Blocks are distributed over threads, and the
final cross-block reduction happens in block order outside the kernel,
so results are bit-identical for any worker count.

The annular-hypercube distance uses a certificate to skip the exact
cross-polytope projection: ``(|x|_1 - c)/sqrt(d)`` is a lower bound on
the distance to the l1-ball, so whenever it is at least the face
distance, the face distance is the minimum.  The rare remaining points
get the exact sort-based projection.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]

    prange = range

KIND_HYPERCUBE = 0
KIND_ANNULAR_HYPERCUBE = 1
KIND_BALL = 2
KIND_ANNULUS = 3

F_ZERO = 0
F_CONST = 1
F_POLY2 = 2


@njit(cache=True, fastmath=True)
def _radii(X, rt, aux, kind, q0, q1, invsqd, zbuf):
    """Exact boundary distance for every point column of X, clamped at 0.

    Loops run coordinate-outer / point-inner so the point dimension
    vectorizes; ``aux`` is a scratch vector of length P.
    """
    d, P = X.shape
    if kind == KIND_HYPERCUBE:
        for p in range(P):
            rt[p] = 0.0
        for i in range(d):
            for p in range(P):
                a = abs(X[i, p])
                rt[p] = max(rt[p], a)
        for p in range(P):
            rt[p] = max(q0 - rt[p], 0.0)
    elif kind == KIND_ANNULAR_HYPERCUBE:
        for p in range(P):
            rt[p] = 0.0
            aux[p] = 0.0
        for i in range(d):
            for p in range(P):
                a = abs(X[i, p])
                rt[p] = max(rt[p], a)
                aux[p] += a
        nfix = 0
        for p in range(P):
            face = max(q0 - rt[p], 0.0)
            rt[p] = face
            if (aux[p] - q1) * invsqd < face:
                nfix += 1
        if nfix > 0:
            # rare exact cross-polytope projection via scalar sort
            for p in range(P):
                if (aux[p] - q1) * invsqd < rt[p]:
                    for i in range(d):
                        zbuf[i] = abs(X[i, p])
                    for i in range(1, d):
                        key = zbuf[i]
                        j = i - 1
                        while j >= 0 and zbuf[j] < key:
                            zbuf[j + 1] = zbuf[j]
                            j -= 1
                        zbuf[j + 1] = key
                    cs = 0.0
                    th = 0.0
                    for i in range(d):
                        cs += zbuf[i]
                        tt = (cs - q1) / (i + 1.0)
                        if tt > th:
                            th = tt
                    s = 0.0
                    for i in range(d):
                        v = min(zbuf[i], th)
                        s += v * v
                    hole = np.sqrt(s)
                    if hole < rt[p]:
                        rt[p] = max(hole, 0.0)
    elif kind == KIND_BALL:
        for p in range(P):
            aux[p] = 0.0
        for i in range(d):
            for p in range(P):
                aux[p] += X[i, p] * X[i, p]
        for p in range(P):
            rt[p] = max(q0 - np.sqrt(aux[p]), 0.0)
    else:
        for p in range(P):
            aux[p] = 0.0
        for i in range(d):
            for p in range(P):
                aux[p] += X[i, p] * X[i, p]
        for p in range(P):
            nrm = np.sqrt(aux[p])
            rt[p] = max(min(nrm - q0, q1 - nrm), 0.0)


@njit(cache=True, fastmath=True)
def _walk_block(
    X0,
    U,
    Y,
    tloc0,
    tloc1,
    n_steps,
    kind,
    q0,
    q1,
    invsqd,
    f_mode,
    f_c0,
    f_lin,
    f_quad,
    g_c0,
    g_lin,
    g_quad,
    inv_dim,
    acc,
    comp,
    accsq,
    compsq,
):
    """Accumulate one reduction block of trajectories for all points."""
    d, P = X0.shape
    X = np.empty((d, P))
    rt = np.empty(P)
    aux = np.empty(P)
    src = np.empty(P)
    fval = np.empty(P)
    zbuf = np.empty(d)
    for t in range(tloc0, tloc1):
        for i in range(d):
            for p in range(P):
                X[i, p] = X0[i, p]
        for p in range(P):
            src[p] = 0.0
        for n in range(n_steps):
            _radii(X, rt, aux, kind, q0, q1, invsqd, zbuf)
            if f_mode == F_CONST:
                for p in range(P):
                    src[p] += rt[p] * rt[p] * f_c0
            elif f_mode == F_POLY2:
                for p in range(P):
                    fval[p] = f_c0
                for i in range(d):
                    yv = Y[t, i]
                    a = f_lin[i]
                    q = f_quad[i]
                    for p in range(P):
                        z = X[i, p] + rt[p] * yv
                        fval[p] += a * z + q * z * z
                for p in range(P):
                    src[p] += rt[p] * rt[p] * fval[p]
            for i in range(d):
                un = U[t, n, i]
                for p in range(P):
                    X[i, p] += rt[p] * un
        # per-trajectory contribution: g(X_M) + (1/d) * source sum
        for p in range(P):
            gv = g_c0
            for i in range(d):
                x = X[i, p]
                gv += g_lin[i] * x + g_quad[i] * x * x
            c = gv + inv_dim * src[p]
            y = c - comp[p]
            s2 = acc[p] + y
            comp[p] = (s2 - acc[p]) - y
            acc[p] = s2
            c2 = c * c
            y = c2 - compsq[p]
            s2 = accsq[p] + y
            compsq[p] = (s2 - accsq[p]) - y
            accsq[p] = s2


@njit(cache=True, parallel=True)
def walk_chunk(
    X0,
    U,
    Y,
    block_lo,
    block_hi,
    n_steps,
    kind,
    q0,
    q1,
    invsqd,
    f_mode,
    f_c0,
    f_lin,
    f_quad,
    g_c0,
    g_lin,
    g_quad,
    inv_dim,
    out_sum,
    out_sumsq,
    out_row0,
):
    """Run the blocks of one draw chunk in parallel; one output row per block."""
    nb = block_lo.shape[0]
    P = X0.shape[1]
    for b in prange(nb):
        acc = np.zeros(P)
        comp = np.zeros(P)
        accsq = np.zeros(P)
        compsq = np.zeros(P)
        _walk_block(
            X0, U, Y, block_lo[b], block_hi[b], n_steps,
            kind, q0, q1, invsqd,
            f_mode, f_c0, f_lin, f_quad, g_c0, g_lin, g_quad, inv_dim,
            acc, comp, accsq, compsq,
        )
        row = out_row0 + b
        for p in range(P):
            out_sum[row, p] = acc[p]
            out_sumsq[row, p] = accsq[p]


@njit(cache=True, fastmath=True)
def _exit_block(
    x0,
    U,
    tloc0,
    tloc1,
    n_steps,
    kind,
    q0,
    q1,
    invsqd,
    eps,
    cp_mask,
    cp_index,
    surv,
    hist,
):
    """Shell-entry statistics for one block of walks from a single start."""
    d = x0.shape[0]
    B = tloc1 - tloc0
    X = np.empty((d, B))
    rt = np.empty(B)
    aux = np.empty(B)
    entered = np.zeros(B, dtype=np.bool_)
    zbuf = np.empty(d)
    for b in range(B):
        for i in range(d):
            X[i, b] = x0[i]
    _radii(X, rt, aux, kind, q0, q1, invsqd, zbuf)
    for b in range(B):
        if rt[b] < eps:
            entered[b] = True
            hist[0] += 1
    if cp_mask[0]:
        row = cp_index[0]
        for b in range(B):
            if rt[b] >= eps:
                surv[row] += 1
    for n in range(n_steps):
        for i in range(d):
            for b in range(B):
                X[i, b] += rt[b] * U[tloc0 + b, n, i]
        _radii(X, rt, aux, kind, q0, q1, invsqd, zbuf)
        for b in range(B):
            if not entered[b] and rt[b] < eps:
                entered[b] = True
                hist[n + 1] += 1
        if cp_mask[n + 1]:
            row = cp_index[n + 1]
            for b in range(B):
                if rt[b] >= eps:
                    surv[row] += 1


@njit(cache=True, parallel=True)
def exit_chunk(
    x0,
    U,
    block_lo,
    block_hi,
    n_steps,
    kind,
    q0,
    q1,
    invsqd,
    eps,
    cp_mask,
    cp_index,
    surv_rows,
    hist_rows,
    out_row0,
):
    nb = block_lo.shape[0]
    for b in prange(nb):
        row = out_row0 + b
        _exit_block(
            x0, U, block_lo[b], block_hi[b], n_steps,
            kind, q0, q1, invsqd, eps, cp_mask, cp_index,
            surv_rows[row], hist_rows[row],
        )
