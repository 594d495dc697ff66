"""Assembly of the full estimator network with frozen randomness.

Given ReLU approximations of the source, the boundary data and the
boundary distance, the M-step N-walk estimator is itself realized as one
ReLU network: per walk, a frozen chain net transports the input point,
the boundary net reads the terminal position, and each step's source
term is the double product prod(prod(rt, rt), f_net(shifted point)),
with all multiplications through the sawtooth product net.

The measured size of every sub-network is asserted against the explicit
accounting chain of the size theorem (walk map, shifted-source
composition, double product, grand total).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import sampling
from ..geometry import Domain
from .net import ReluNet, scale_output
from .calculus import augment, compose, linear_combine, stack_parallel
from .build import (
    KAPPA_PRODUCT,
    chain_net,
    chain_size_bound,
    product_net,
    relu_shift_net,
    step_net,
)

DEFAULT_PARAM_CAP = 100_000_000


class AssemblyBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class FrozenRandomness:
    """The draw set of one estimator run; regenerated, never stored."""

    seed: int
    n_steps: int
    n_walks: int
    dim: int

    def directions(self) -> np.ndarray:
        return sampling.direction_block(self.seed, 0, self.n_walks, self.n_steps, self.dim)

    def green_points(self) -> np.ndarray:
        return sampling.green_block(self.seed, 0, self.n_walks, self.dim)


@dataclass(frozen=True)
class SizeAudit:
    measured: int
    bound: float
    per_term_ok: bool

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound and self.per_term_ok


def _product_log_term(eps_p: float, c: float) -> float:
    return KAPPA_PRODUCT * (math.log2(1.0 / eps_p) + math.log2(max(c, 2.0)) + 1.0)


def boundary_term_size_bound(g_net: ReluNet, r_net: ReluNet, n_steps: int, dim: int) -> float:
    """Accounting bound for g_net composed with the M-step walk map."""
    rt_w, rt_l, rt_s = r_net.width, r_net.depth + 1, r_net.size + 2
    walk = 2.0 * dim * n_steps * (4 * dim + rt_w + rt_l + 2) + dim + 2.0 * n_steps * rt_s
    return 2.0 * g_net.size + 2.0 * walk


def source_term_size_bound(
    f_net: ReluNet, r_net: ReluNet, k: int, dim: int, eps_p: float, c: float
) -> float:
    """Accounting bound for one step-k source term (double product included)."""
    rt_w, rt_l, rt_s = r_net.width, r_net.depth + 1, r_net.size + 2
    # f_net composed with the (k+1)-step-shaped shifted chain
    shifted = (
        2.0 * f_net.size
        + 4.0 * dim * (k + 1) * (4 * dim + rt_w + rt_l + 2)
        + 2.0 * dim
        + 4.0 * (k + 1) * rt_s
    )
    # rt at step k, squared through the product net
    rt_at_k = 2.0 * rt_s + 2.0 * chain_size_bound_shiftable(rt_w, rt_l, rt_s, k, dim)
    inner_product = 8.0 * rt_at_k + _product_log_term(eps_p, c)
    return 4.0 * inner_product + 4.0 * shifted + _product_log_term(eps_p, c)


def chain_size_bound_shiftable(rt_w, rt_l, rt_s, n_steps, dim) -> float:
    if n_steps == 0:
        return float(dim)
    return 2.0 * dim * n_steps * (4 * dim + rt_w + rt_l + 2) + dim + 2.0 * n_steps * rt_s


def assembled_size_bound(
    g_net: ReluNet,
    f_net: ReluNet,
    r_net: ReluNet,
    n_steps: int,
    n_walks: int,
    dim: int,
    eps_p: float,
    c: float,
    f_zero: bool,
) -> float:
    """Total measured-size budget from the per-term accounting chain.

    Linear combination adds sizes; depth padding of ragged terms costs at
    most 2 (L* - L) extra entries per term, absorbed by doubling the
    per-term budgets.
    """
    total = n_walks * boundary_term_size_bound(g_net, r_net, n_steps, dim)
    if not f_zero:
        for k in range(n_steps):
            total += n_walks * source_term_size_bound(f_net, r_net, k, dim, eps_p, c)
    return 2.0 * total + 2 * dim


def assemble_solution_net(
    domain: Domain,
    omega: FrozenRandomness,
    g_net: ReluNet,
    f_net: Optional[ReluNet],
    r_net: ReluNet,
    eps_r: float,
    eps_p: float,
    c: float,
    param_cap: int = DEFAULT_PARAM_CAP,
) -> tuple[ReluNet, SizeAudit]:
    """Build the single network realizing the frozen-draw estimator.

    ``r_net`` approximates the boundary distance with sup error
    ``eps_r``; the walk radius is its shifted rectification
    ``(r_net - eps_r)^+``.  ``f_net = None`` drops the source part (the
    assembled net is then exactly the boundary average).  ``eps_p`` and
    ``c`` configure every product net.

    Returns the net and the size audit against the accounting bounds.
    """
    d = domain.dim
    if omega.dim != d:
        raise ValueError("randomness dimension mismatch")
    if g_net.input_dim != d or r_net.input_dim != d:
        raise ValueError("component net input dimension mismatch")
    if f_net is not None and f_net.input_dim != d:
        raise ValueError("source net input dimension mismatch")
    if eps_p <= 0 or c <= 0:
        raise ValueError("eps_p and c must be positive")

    f_zero = f_net is None
    budget = assembled_size_bound(
        g_net, f_net if f_net is not None else g_net, r_net,
        omega.n_steps, omega.n_walks, d, eps_p, c, f_zero,
    )
    if budget > param_cap:
        raise AssemblyBudgetError(
            f"predicted parameter count {budget:.3g} exceeds the cap {param_cap:.3g}; "
            "raise param_cap explicitly for large instances"
        )

    rt_net = relu_shift_net(r_net, eps_r)
    pi_net = product_net(c, eps_p) if not f_zero else None
    U = omega.directions()
    Y = omega.green_points() if not f_zero else None

    terms = []
    coeffs = []
    per_term_ok = True
    inv_n = 1.0 / omega.n_walks
    for i in range(omega.n_walks):
        prefix = [chain_net(rt_net, U[i, :0])]
        for k in range(omega.n_steps):
            prefix.append(compose(step_net(rt_net, U[i, k]), prefix[-1]))
        g_term = compose(g_net, prefix[omega.n_steps])
        per_term_ok &= g_term.size <= boundary_term_size_bound(g_net, r_net, omega.n_steps, d)
        terms.append(g_term)
        coeffs.append(inv_n)
        if f_zero:
            continue
        for k in range(omega.n_steps):
            theta = prefix[k]
            rt_k = compose(rt_net, theta)
            shifted = compose(f_net, compose(step_net(rt_net, Y[i]), theta))
            rt_sq = compose(pi_net, stack_parallel([rt_k, rt_k]))
            term = compose(pi_net, stack_parallel([rt_sq, shifted]))
            per_term_ok &= term.size <= source_term_size_bound(
                f_net, r_net, k, d, eps_p, c
            )
            terms.append(term)
            coeffs.append(inv_n / d)

    depth = max(t.depth for t in terms)
    terms = [t if t.depth == depth else augment(t, depth) for t in terms]
    net = linear_combine(terms, coeffs)
    audit = SizeAudit(net.size, budget, bool(per_term_ok))
    assert audit.ok, (net.size, budget, per_term_ok)
    return net, audit


def extension_net(
    psi_net: ReluNet,
    r_net: ReluNet,
    g_net: ReluNet,
    pi_net: ReluNet,
    eps0: float,
    delta_bar: float,
    c: float,
) -> ReluNet:
    """Cutoff boundary extension prod(psi_net(r_net/eps0), g_net(pi_net(x))).

    ``delta_bar`` is the caller-computed total sup error (it sets the
    product tolerance at delta_bar/2); ``c`` bounds both product inputs.
    """
    if eps0 <= 0 or delta_bar <= 0:
        raise ValueError("eps0 and delta_bar must be positive")
    window = compose(psi_net, scale_output(r_net, 1.0 / eps0))
    boundary = compose(g_net, pi_net)
    prod = product_net(c, min(delta_bar / 2.0, 0.5))
    out = compose(prod, stack_parallel([window, boundary]))
    comp_sizes = psi_net.size + r_net.size + g_net.size + pi_net.size
    bound = 8.0 * comp_sizes + 4.0 * _product_log_term(min(delta_bar / 2.0, 0.5), c) + 8.0 * (
        window.depth + boundary.depth
    )
    assert out.size <= bound, (out.size, bound)
    return out
