"""The sphere-walk chain and its fixed-step Monte Carlo estimator.

The estimator for the problem ``(1/2) lap u = -f`` in D, ``u = g`` on the
boundary, evaluated at x, runs N independent walks of exactly M steps:

    u(x) ~ (1/N) sum_i [ g(X_M^{x,i})
                         + (1/d) sum_k rt(X_{k-1})^2 f(X_{k-1} + rt(X_{k-1}) Y^i) ]

with one Green-measure draw Y^i per walk, reused at every step of that
walk.  All evaluation points share the same draws (common random
numbers), which is what makes the estimator a deterministic Hoelder
function of x for each seed.

Reduction contract: walks are grouped into fixed blocks of
:data:`BLOCK` trajectories; blocks accumulate in trajectory order with
compensated summation and are themselves reduced in block order with
exact summation, so the result is independent of the worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import sampling
from .fields import Field
from .geometry import Domain, DomainKind, SurrogateDistance
from . import _kernels

BLOCK = 100          # trajectories per reduction block (fixed)
CHUNK_BLOCKS = 16    # blocks whose draws are materialized together
POINT_TILE = 500     # points per kernel call (keeps the state in cache)

_KIND_CODE = {
    DomainKind.HYPERCUBE: _kernels.KIND_HYPERCUBE,
    DomainKind.ANNULAR_HYPERCUBE: _kernels.KIND_ANNULAR_HYPERCUBE,
    DomainKind.BALL: _kernels.KIND_BALL,
    DomainKind.ANNULUS: _kernels.KIND_ANNULUS,
}


class EvaluationError(RuntimeError):
    pass


@dataclass
class WosConfig:
    """Everything one estimator run needs: problem data, sizes, seed."""

    domain: Domain
    surrogate: SurrogateDistance
    f: Field
    g: Field
    n_steps: int
    n_walks: int
    seed: int = 0

    def __post_init__(self):
        if self.n_steps < 0 or self.n_walks < 1:
            raise ValueError("need n_steps >= 0 and n_walks >= 1")
        if not isinstance(self.f, Field):
            self.f = Field.from_callable(self.f, self.domain.dim)
        if not isinstance(self.g, Field):
            self.g = Field.from_callable(self.g, self.domain.dim)
        if self.domain.dim < 3 and not self.f.is_zero:
            raise ValueError(
                "the Green-kernel source sampler requires dim >= 3; "
                "only f = 0 is supported below"
            )


@dataclass(frozen=True)
class EstimateResult:
    values: np.ndarray
    stderr: np.ndarray
    n_used: int


@dataclass(frozen=True)
class ExitStats:
    hit_counts: np.ndarray   # hit_counts[n] = #walks that first entered the shell at step n
    survival_prob: float     # fraction with r(X_M) >= eps
    n_walks: int


def step(x, u, surrogate: SurrogateDistance) -> np.ndarray:
    """One chain step x + rt(x) u; stays inside the domain since rt <= r."""
    x = np.asarray(x, dtype=float)
    return x + surrogate.at(x) * np.asarray(u, dtype=float)


def run_trajectory(x, traj_index: int, cfg: WosConfig):
    """Reference single-walk evaluation.

    Returns (terminal point, source sum); uses exactly the draws that
    :func:`estimate` uses for the same trajectory index, so it serves as
    an oracle for the batched paths.
    """
    d = cfg.domain.dim
    x = np.asarray(x, dtype=float)
    if cfg.n_steps == 0:
        return x.copy(), 0.0
    dirs = sampling.direction_block(cfg.seed, traj_index, traj_index + 1, cfg.n_steps, d)[0]
    need_y = not cfg.f.is_zero
    y = sampling.green_block(cfg.seed, traj_index, traj_index + 1, d)[0] if need_y else None
    pos = x.copy()
    terms = []
    for n in range(cfg.n_steps):
        rt = cfg.surrogate.at(pos)
        if need_y:
            terms.append(rt * rt * cfg.f.at(pos + rt * y))
        pos = pos + rt * dirs[n]
    return pos, math.fsum(terms) / d if terms else 0.0


def _block_edges(n_walks: int, checkpoints: Sequence[int]) -> np.ndarray:
    """Reduction-block boundaries: BLOCK grid joined with the checkpoints."""
    edges = set(range(0, n_walks, BLOCK))
    edges.add(n_walks)
    for c in checkpoints:
        if not 0 < c <= n_walks:
            raise ValueError(f"checkpoint {c} outside 1..{n_walks}")
        edges.add(c)
    return np.array(sorted(edges), dtype=np.int64)


def _fast_path_ok(cfg: WosConfig) -> bool:
    return (
        _kernels.HAVE_NUMBA
        and cfg.surrogate.exact
        and cfg.surrogate.domain == cfg.domain
        and cfg.f.is_poly2
        and cfg.g.is_poly2
    )


def _poly2_args(fld: Field, dim: int):
    lin = fld.lin if fld.lin is not None else np.zeros(dim)
    quad = fld.quad if fld.quad is not None else np.zeros(dim)
    return float(fld.const), np.ascontiguousarray(lin), np.ascontiguousarray(quad)


def _set_threads(threads: Optional[int]):
    if threads is None or not _kernels.HAVE_NUMBA:
        return
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(int(threads), limit)))


def estimate(
    points,
    cfg: WosConfig,
    threads: Optional[int] = None,
    checkpoints: Optional[Sequence[int]] = None,
):
    """Estimate the solution at every point with shared walk draws.

    With ``checkpoints`` (ascending walk counts) a dict {n: EstimateResult}
    of prefix estimates is returned instead of the single full result;
    prefix estimates reuse the same walks, so the n-walk entry equals a
    run with n_walks = n.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if X.shape[1] != cfg.domain.dim:
        raise ValueError(f"points must have dimension {cfg.domain.dim}")
    inside = cfg.domain.contains_many(X)
    if not inside.all():
        bad = X[np.nonzero(~inside)[0][0]]
        raise ValueError(f"evaluation point outside the domain: {bad}")
    cps = list(checkpoints) if checkpoints is not None else []
    if cps != sorted(cps):
        raise ValueError("checkpoints must be ascending")

    if cfg.n_steps == 0 and cfg.f.is_zero:
        vals = cfg.g(X)
        res = EstimateResult(vals, np.zeros_like(vals), cfg.n_walks)
        return {c: res for c in cps} if checkpoints is not None else res

    _set_threads(threads)
    if _fast_path_ok(cfg):
        sums, sumsq, edges = _run_fast(X, cfg, cps)
    else:
        sums, sumsq, edges = _run_generic(X, cfg, cps)

    def reduce_to(n: int) -> EstimateResult:
        k = int(np.searchsorted(edges, n, side="right"))
        assert k > 0 and edges[k - 1] == n, "reduction target must be a block edge"
        vals = np.array([math.fsum(sums[:k, p]) for p in range(X.shape[0])])
        sq = np.array([math.fsum(sumsq[:k, p]) for p in range(X.shape[0])])
        mean = vals / n
        if not (np.isfinite(mean).all() and np.isfinite(sq).all()):
            bad = X[int(np.nonzero(~(np.isfinite(mean) & np.isfinite(sq)))[0][0])]
            raise EvaluationError(f"non-finite contribution at point {bad}")
        if n > 1:
            var = np.maximum(sq - n * mean * mean, 0.0) / (n - 1)
            se = np.sqrt(var / n)
        else:
            se = np.zeros_like(mean)
        return EstimateResult(mean, se, n)

    if checkpoints is not None:
        return {c: reduce_to(c) for c in cps}
    return reduce_to(cfg.n_walks)


def _run_fast(X, cfg: WosConfig, checkpoints):
    d = cfg.domain.dim
    edges = _block_edges(cfg.n_walks, checkpoints)
    nb = len(edges) - 1
    P = X.shape[0]
    sums = np.empty((nb, P))
    sumsq = np.empty((nb, P))
    X0 = np.ascontiguousarray(X.T)

    kind = _KIND_CODE[cfg.domain.kind]
    q0, q1 = cfg.domain.p0, cfg.domain.p1
    invsqd = 1.0 / math.sqrt(d)
    if cfg.f.is_zero:
        f_mode, f_c0 = _kernels.F_ZERO, 0.0
        f_lin = f_quad = np.zeros(d)
    elif cfg.f.is_const:
        f_mode, f_c0 = _kernels.F_CONST, cfg.f.const
        f_lin = f_quad = np.zeros(d)
    else:
        f_mode = _kernels.F_POLY2
        f_c0, f_lin, f_quad = _poly2_args(cfg.f, d)
    g_c0, g_lin, g_quad = _poly2_args(cfg.g, d)

    b = 0
    while b < nb:
        b_hi = min(b + CHUNK_BLOCKS, nb)
        t_lo, t_hi = int(edges[b]), int(edges[b_hi])
        U = sampling.direction_block(cfg.seed, t_lo, t_hi, cfg.n_steps, d)
        if f_mode == _kernels.F_POLY2:
            Y = sampling.green_block(cfg.seed, t_lo, t_hi, d)
        else:
            Y = np.zeros((t_hi - t_lo, d))
        # tile the evaluation points so the chain state stays cache-resident
        for p_lo in range(0, P, POINT_TILE):
            p_hi = min(p_lo + POINT_TILE, P)
            _kernels.walk_chunk(
                np.ascontiguousarray(X0[:, p_lo:p_hi]), U, Y,
                edges[b:b_hi] - t_lo, edges[b + 1 : b_hi + 1] - t_lo,
                cfg.n_steps, kind, q0, q1, invsqd,
                f_mode, f_c0, f_lin, f_quad, g_c0, g_lin, g_quad, 1.0 / d,
                sums[:, p_lo:p_hi], sumsq[:, p_lo:p_hi], b,
            )
        b = b_hi
    return sums, sumsq, edges[1:]


def _run_generic(X, cfg: WosConfig, checkpoints):
    """Vectorized numpy path for arbitrary surrogates and callables."""
    d = cfg.domain.dim
    edges = _block_edges(cfg.n_walks, checkpoints)
    nb = len(edges) - 1
    P = X.shape[0]
    sums = np.empty((nb, P))
    sumsq = np.empty((nb, P))
    need_y = not cfg.f.is_zero
    for b in range(nb):
        t_lo, t_hi = int(edges[b]), int(edges[b + 1])
        B = t_hi - t_lo
        U = sampling.direction_block(cfg.seed, t_lo, t_hi, cfg.n_steps, d)
        Y = sampling.green_block(cfg.seed, t_lo, t_hi, d) if need_y else None
        for p in range(P):
            pos = np.tile(X[p], (B, 1))
            src = np.zeros(B)
            for n in range(cfg.n_steps):
                rt = cfg.surrogate(pos)
                if need_y:
                    src += rt * rt * cfg.f(pos + rt[:, None] * Y)
                pos = pos + rt[:, None] * U[:, n, :]
            contrib = cfg.g(pos) + src / d
            sums[b, p] = math.fsum(contrib)
            sumsq[b, p] = math.fsum(contrib * contrib)
    return sums, sumsq, edges[1:]


def exit_stats(
    x,
    n_steps: int,
    eps: float,
    n_walks: int,
    cfg: WosConfig,
    step_checkpoints: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
):
    """Shell-entry statistics of the chain from x.

    Returns :class:`ExitStats`; with ``step_checkpoints`` a dict mapping
    each checkpoint M' to the survival fraction P(r(X_M') >= eps), all
    measured along the same coupled walks.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=float)
    if not cfg.domain.contains(x):
        raise ValueError(f"start point outside the domain: {x}")
    cps = sorted(step_checkpoints) if step_checkpoints is not None else [n_steps]
    if cps and (cps[0] < 0 or cps[-1] > n_steps):
        raise ValueError("step checkpoints must lie in 0..n_steps")
    _set_threads(threads)

    d = cfg.domain.dim
    if not (_kernels.HAVE_NUMBA and cfg.surrogate.exact and cfg.surrogate.domain == cfg.domain):
        return _exit_stats_generic(x, n_steps, eps, n_walks, cfg, cps, step_checkpoints)

    kind = _KIND_CODE[cfg.domain.kind]
    cp_mask = np.zeros(n_steps + 1, dtype=np.bool_)
    cp_index = np.zeros(n_steps + 1, dtype=np.int64)
    for j, c in enumerate(cps):
        cp_mask[c] = True
        cp_index[c] = j
    edges = _block_edges(n_walks, [])
    nb = len(edges) - 1
    surv_rows = np.zeros((nb, len(cps)), dtype=np.int64)
    hist_rows = np.zeros((nb, n_steps + 1), dtype=np.int64)
    b = 0
    while b < nb:
        b_hi = min(b + CHUNK_BLOCKS, nb)
        t_lo, t_hi = int(edges[b]), int(edges[b_hi])
        U = sampling.direction_block(cfg.seed, t_lo, t_hi, n_steps, d)
        _kernels.exit_chunk(
            x, U, edges[b:b_hi] - t_lo, edges[b + 1 : b_hi + 1] - t_lo,
            n_steps, kind, cfg.domain.p0, cfg.domain.p1, 1.0 / math.sqrt(d),
            eps, cp_mask, cp_index, surv_rows, hist_rows, b,
        )
        b = b_hi
    surv = surv_rows.sum(axis=0) / n_walks
    hist = hist_rows.sum(axis=0)
    if step_checkpoints is not None:
        return {c: float(surv[j]) for j, c in enumerate(cps)}
    return ExitStats(hist, float(surv[-1]), n_walks)


def _exit_stats_generic(x, n_steps, eps, n_walks, cfg, cps, step_checkpoints):
    d = cfg.domain.dim
    edges = _block_edges(n_walks, [])
    surv = np.zeros(len(cps))
    hist = np.zeros(n_steps + 1, dtype=np.int64)
    cpset = {c: j for j, c in enumerate(cps)}
    for b in range(len(edges) - 1):
        t_lo, t_hi = int(edges[b]), int(edges[b + 1])
        B = t_hi - t_lo
        U = sampling.direction_block(cfg.seed, t_lo, t_hi, n_steps, d)
        pos = np.tile(x, (B, 1))
        r = cfg.domain.distance_many(pos)
        entered = r < eps
        hist[0] += int(entered.sum())
        if 0 in cpset:
            surv[cpset[0]] += int((r >= eps).sum())
        for n in range(n_steps):
            rt = cfg.surrogate(pos)
            pos = pos + rt[:, None] * U[:, n, :]
            r = cfg.domain.distance_many(pos)
            fresh = (~entered) & (r < eps)
            hist[n + 1] += int(fresh.sum())
            entered |= fresh
            if n + 1 in cpset:
                surv[cpset[n + 1]] += int((r >= eps).sum())
    surv /= n_walks
    if step_checkpoints is not None:
        return {c: float(surv[j]) for j, c in enumerate(cps)}
    return ExitStats(hist, float(surv[-1]), n_walks)


def lipschitz_probe(x, y, cfg: WosConfig) -> float:
    """|u_M^N(x) - u_M^N(y)| under shared draws (for Hoelder-bound checks)."""
    res = estimate(np.stack([np.asarray(x, float), np.asarray(y, float)]), cfg)
    return float(abs(res.values[0] - res.values[1]))


def lipschitz_bound(cfg: WosConfig, pd, dist: float) -> float:
    """Almost-sure Hoelder bound on one-sample estimator increments."""
    grow = (2.0 + pd.r_lip) ** cfg.n_steps
    coef = pd.g_alpha + (pd.diam**2 * pd.f_alpha + 2.0 * pd.diam * pd.f_inf) / pd.dim
    return coef * grow * max(dist**pd.alpha, dist)
