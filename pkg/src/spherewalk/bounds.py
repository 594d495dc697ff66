"""Explicit error constants and the (gamma, eta) -> (eps0, K, M, N) planner.

Everything here is a pure function of value types.  The bound formulas
track three error sources of the stopped-walk estimator:

* grid/regularity term   -- Hoelder extrapolation from an auxiliary grid,
* boundary proximity     -- via a surrogate for the mean exit time near
                            the boundary (``eps * adiam``, ``diam**2/d``,
                            or a user-supplied value),
* shell tail             -- probability that the chain has not reached
                            the eps-shell after M steps (general
                            exponential form, or the geometric form for
                            defective-convex domains).

The tail bound divides by the squared Hoeffding range by default; the
displayed form of the source theorem divides by the unsquared range,
which is dimensionally inconsistent with Hoeffding's inequality, so the
squared form is the default and the other is available behind a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

VSurrogate = Union[str, float]  # "eps_adiam" | "diam_sq" | explicit value


@dataclass(frozen=True)
class ProblemData:
    """Norms and geometry constants feeding every bound formula."""

    dim: int
    diam: float
    g_inf: float = 0.0
    g_alpha: float = 0.0
    alpha: float = 1.0
    f_inf: float = 0.0
    f_alpha: float = 0.0
    lap_g_inf: Optional[float] = None
    adiam: Optional[float] = None
    delta: Optional[float] = None
    beta: float = 1.0
    r_lip: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if self.delta is not None and not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        for name in ("g_inf", "g_alpha", "f_inf", "f_alpha", "diam"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class WosPlan:
    eps0: float
    grid_factor: int  # K
    n_steps: int      # M
    n_walks: int      # N
    gamma: float
    eta: float
    defective: bool


# ---------------------------------------------------------------------------
# exit-time and shell-tail bounds
# ---------------------------------------------------------------------------

def v_sup_bound(pd: ProblemData) -> float:
    """Supremum bound diam^2/d for the mean exit time."""
    return pd.diam**2 / pd.dim


def annulus_exit_bound(r0: float, r1: float, dist_to_boundary: float) -> float:
    """Mean-exit-time bound dist * (r1-r0) * r1 / r0 for an annulus."""
    if not 0 < r0 < r1:
        raise ValueError("need 0 < r0 < r1")
    if dist_to_boundary < 0:
        raise ValueError("dist_to_boundary must be >= 0")
    return dist_to_boundary * (r1 - r0) * r1 / r0


def shell_tail_general(n_steps: int, eps: float, pd: ProblemData) -> float:
    """P(chain missed the eps-shell after n_steps), general domains."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    expo = pd.beta**2 * eps**2 * n_steps / (4.0 * pd.diam**2)
    return min(1.0, 2.0 * math.exp(-expo))


def defective_rate(pd: ProblemData, displayed_rate: bool = False) -> float:
    """Per-step contraction factor of E[sqrt(r(X_n))] on defective domains.

    The proof of the drift inequality lower-bounds the occupation
    integral of r^(-3/2) over the step ball with (2 r(x))^(-3/2) but the
    displayed statement drops the 2^(-3/2), yielding a rate constant of
    beta^2(1-delta)/(4d) instead of the proof's beta^2(1-delta)/(2^3.5 d).
    The displayed constant is empirically violated by the walk on a
    hypercube at large step counts (the flat-face one-step contraction is
    only 1/(8d)); the proof-faithful constant is the default and the
    displayed one sits behind this flag.
    """
    if pd.delta is None:
        raise ValueError("delta metadata is required for the defective rate")
    denom = 4.0 if displayed_rate else 2.0**3.5
    return 1.0 - pd.beta**2 * (1.0 - pd.delta) / (denom * pd.dim)


def lyapunov_tail(
    n_steps: int, eps: float, rx: float, pd: ProblemData, displayed_rate: bool = False
) -> float:
    """Unclamped geometric tail rate^M * sqrt(r(x)/eps) (may exceed 1)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return defective_rate(pd, displayed_rate) ** n_steps * math.sqrt(max(rx, 0.0) / eps)


def shell_tail_defective(
    n_steps: int, eps: float, rx: float, pd: ProblemData, displayed_rate: bool = False
) -> float:
    """Geometric shell tail (defective domains), clamped to [0, 1]."""
    return min(1.0, max(0.0, lyapunov_tail(n_steps, eps, rx, pd, displayed_rate)))


def mgf_diagnostic(
    a: float, rx: float, eps: float, pd: ProblemData, displayed_rate: bool = False
) -> float:
    """Bound 1 + a/(1 - a*rate) * sqrt(r(x))/sqrt(eps) on E[a^(steps to shell)]."""
    rate = defective_rate(pd, displayed_rate)
    if not 1.0 < a < 1.0 / rate:
        raise ValueError(f"need 1 < a < {1.0 / rate:.6g}")
    return 1.0 + a / (1.0 - a * rate) * math.sqrt(max(rx, 0.0)) / math.sqrt(eps)


# ---------------------------------------------------------------------------
# bias and concentration
# ---------------------------------------------------------------------------

def _v_value(pd: ProblemData, eps: float, v_surrogate: VSurrogate) -> float:
    if isinstance(v_surrogate, str):
        if v_surrogate == "eps_adiam":
            if pd.adiam is None:
                raise ValueError(
                    "v surrogate 'eps_adiam' needs adiam metadata; use "
                    "'diam_sq' or pass an explicit value"
                )
            return eps * pd.adiam
        if v_surrogate == "diam_sq":
            return v_sup_bound(pd)
        raise ValueError(f"unknown v surrogate {v_surrogate!r}")
    val = float(v_surrogate)
    if val < 0:
        raise ValueError("explicit v surrogate must be >= 0")
    return val


def _tail_factor(
    pd: ProblemData, n_steps: int, eps: float, defective: bool, displayed_rate: bool = False
) -> float:
    if defective:
        return shell_tail_defective(n_steps, eps, pd.diam, pd, displayed_rate)
    expo = pd.beta**2 * eps**2 * n_steps / (4.0 * pd.diam**2)
    return math.exp(-expo)


def bias_a(
    pd: ProblemData,
    n_steps: int,
    grid_factor: int,
    eps: float,
    v_surrogate: VSurrogate = "eps_adiam",
    c2_smooth: bool = False,
    defective: bool = False,
) -> float:
    """Deterministic part A of the sup-norm error bound.

    Three terms: grid extrapolation, boundary proximity (through the
    chosen exit-time surrogate) and the shell tail after n_steps.  With
    ``c2_smooth`` the twice-differentiable variant is used (grid exponent
    1, Laplacian-based proximity term, tail coefficient 8|g|_inf).
    """
    if eps <= 0 or grid_factor < 1:
        raise ValueError("need eps > 0 and grid_factor >= 1")
    d = pd.dim
    diam = pd.diam
    v = _v_value(pd, eps, v_surrogate)
    grid_coef = 2.0 * (
        pd.g_alpha + (diam**2 * pd.f_alpha + 2.0 * diam * pd.f_inf) / d
    )
    tail = _tail_factor(pd, n_steps, eps, defective)
    if c2_smooth:
        if pd.lap_g_inf is None:
            raise ValueError("c2_smooth requires lap_g_inf")
        grid = grid_coef * (diam / grid_factor)
        proximity = (0.5 * pd.lap_g_inf + pd.f_inf) * v
        tail_coef = 8.0 * pd.g_inf + 2.0 * diam**2 * pd.f_inf / d
    else:
        grid = grid_coef * (diam / grid_factor) ** pd.alpha
        proximity = d ** (pd.alpha / 2.0) * pd.g_alpha * v ** (pd.alpha / 2.0) + pd.f_inf * v
        tail_coef = 4.0 * pd.g_inf + 2.0 * diam**2 * pd.f_inf / d
    return grid + proximity + tail_coef * tail


def hoeffding_range(pd: ProblemData, n_steps: int) -> float:
    """Sup bound C2 = |g|_inf + M diam^2 |f|_inf / d on one walk's contribution."""
    return pd.g_inf + n_steps * pd.diam**2 * pd.f_inf / pd.dim


def grid_entropy(pd: ProblemData, n_steps: int, grid_factor: int, c2_smooth: bool = False) -> float:
    """Log grid cardinality C1 = d(ceil(M/alpha) log(2+|r|_1) + log K)."""
    m_eff = n_steps if c2_smooth else math.ceil(n_steps / pd.alpha)
    return pd.dim * (m_eff * math.log(2.0 + pd.r_lip) + math.log(grid_factor))


def point_tail_bound(gamma: float, n_walks: int, n_steps: int, pd: ProblemData) -> float:
    """Single-point Hoeffding tail 2 exp(-N gamma^2 / C2^2)."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    c2 = hoeffding_range(pd, n_steps)
    if c2 == 0.0:
        return 0.0 if gamma > 0 else 1.0
    return min(1.0, 2.0 * math.exp(-n_walks * gamma**2 / c2**2))


def tail_bound(
    gamma: float,
    n_walks: int,
    n_steps: int,
    grid_factor: int,
    eps: float,
    pd: ProblemData,
    v_surrogate: VSurrogate = "eps_adiam",
    c2_smooth: bool = False,
    defective: bool = False,
    squared_denominator: bool = True,
) -> float:
    """Sup-norm tail bound min(1, 2 exp(C1 - N ((gamma-A)^+)^2 / C2^2)).

    ``squared_denominator=False`` reproduces the displayed (unsquared)
    form of the source estimate instead of the proof-faithful one.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    a_val = bias_a(pd, n_steps, grid_factor, eps, v_surrogate, c2_smooth, defective)
    c1 = grid_entropy(pd, n_steps, grid_factor, c2_smooth)
    c2 = hoeffding_range(pd, n_steps)
    margin = max(gamma - a_val, 0.0)
    if margin == 0.0:
        return 1.0
    if c2 == 0.0:
        return 0.0
    denom = c2**2 if squared_denominator else c2
    return min(1.0, 2.0 * math.exp(c1 - n_walks * margin**2 / denom))


def expectation_bound(
    n_walks: int,
    n_steps: int,
    grid_factor: int,
    eps: float,
    pd: ProblemData,
    v_surrogate: VSurrogate = "eps_adiam",
    c2_smooth: bool = False,
    defective: bool = False,
) -> float:
    """Mean sup-norm error bound A + B / sqrt(N)."""
    a_val = bias_a(pd, n_steps, grid_factor, eps, v_surrogate, c2_smooth, defective)
    c1 = grid_entropy(pd, n_steps, grid_factor, c2_smooth)
    c2 = hoeffding_range(pd, n_steps)
    b_val = c2 * (math.sqrt(c1 + math.log(2.0)) + 1.0)
    return a_val + b_val / math.sqrt(n_walks)


def l2_mean_bound(
    n_walks: int, n_steps: int, pd: ProblemData, volume: float, sup_bias: float
) -> float:
    """Mean squared L2 error bound 2|D| [bias^2 + 2(|g|^2 + M|f|^2 diam^4/d^3)/N]."""
    if volume <= 0:
        raise ValueError("volume must be positive")
    var = pd.g_inf**2 + n_steps * pd.f_inf**2 * pd.diam**4 / pd.dim**3
    return 2.0 * volume * (sup_bias**2 + 2.0 * var / n_walks)


# ---------------------------------------------------------------------------
# the planner
# ---------------------------------------------------------------------------

def plan_eps0(gamma: float, pd: ProblemData, boundary_coef: float = 4.0) -> float:
    """Shell width from the closed-form parameter choice.

    ``boundary_coef`` is the coefficient on (|g|_alpha + |f|_inf) * adiam;
    the parameter-choice corollary uses 4, the network assembly theorem
    uses the variant with 4|g|_alpha + |f|_inf, so the factor is exposed.
    """
    if pd.adiam is None:
        raise ValueError("the planner requires adiam metadata (uniform exterior ball)")
    bracket = max(1.0 + boundary_coef * (pd.g_alpha + pd.f_inf) * pd.adiam, 1.0)
    return bracket ** (-2.0 / pd.alpha) * gamma ** (2.0 / pd.alpha) / pd.dim


def plan(
    gamma: float,
    eta: float,
    pd: ProblemData,
    defective: bool = False,
    boundary_coef: float = 4.0,
    displayed_rate: bool = False,
) -> WosPlan:
    """Choose (eps0, K, M, N) so the sup-norm error exceeds gamma with
    probability at most eta.

    ``defective=True`` uses the geometric shell tail (requires delta
    metadata) and gives M of order d log(d/gamma); otherwise the general
    exponential tail drives M like 1/eps0^2.
    """
    if not 0 < gamma:
        raise ValueError("gamma must be positive")
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    d, diam = pd.dim, pd.diam
    eps0 = plan_eps0(gamma, pd, boundary_coef)

    k_base = (
        8.0 * (pd.g_alpha + (diam**2 * pd.f_alpha + 2.0 * diam * pd.f_inf) / d) + 1.0
    )
    grid_factor = max(1, math.ceil(diam * (k_base / gamma) ** (1.0 / pd.alpha)))

    tail_coef = 4.0 * pd.g_inf + 2.0 * diam**2 * pd.f_inf / d
    if tail_coef <= 0.0:
        n_steps = 1  # no boundary/source data: the tail term vanishes
    elif defective:
        if pd.delta is None:
            raise ValueError(
                "defective planning requires delta metadata; pass "
                "defective=False for the general-domain rule"
            )
        num = math.log(4.0 / gamma * math.sqrt(diam / eps0)) + math.log(tail_coef)
        denom_d = (4.0 if displayed_rate else 2.0**3.5) * d
        n_steps = max(1, math.ceil(denom_d * num / (pd.beta**2 * (1.0 - pd.delta))))
    else:
        num = math.log(4.0 / gamma) + math.log(tail_coef)
        n_steps = max(
            1, math.ceil(num * 4.0 * diam**2 / (pd.beta**2 * eps0**2))
        )

    c1 = grid_entropy(pd, n_steps, grid_factor)
    c2 = hoeffding_range(pd, n_steps)
    n_walks = max(
        1,
        math.ceil(16.0 * (c1 + math.log(2.0 / eta)) * c2**2 / (9.0 * gamma**2)),
    )
    return WosPlan(eps0, grid_factor, n_steps, n_walks, gamma, eta, defective)


def plan_satisfies(plan_: WosPlan, pd: ProblemData, displayed_rate: bool = False) -> bool:
    """Re-check the defining inequalities of a plan (construction audit)."""
    d, diam = pd.dim, pd.diam
    gamma = plan_.gamma
    ok = plan_.eps0 <= plan_eps0(gamma, pd) * (1.0 + 1e-12)

    grid_coef = 2.0 * (
        pd.g_alpha + (diam**2 * pd.f_alpha + 2.0 * diam * pd.f_inf) / d
    )
    ok &= grid_coef * (diam / plan_.grid_factor) ** pd.alpha <= gamma / 4.0 + 1e-12

    tail_coef = 4.0 * pd.g_inf + 2.0 * diam**2 * pd.f_inf / d
    if tail_coef > 0.0:
        tail = (
            shell_tail_defective(plan_.n_steps, plan_.eps0, diam, pd, displayed_rate)
            if plan_.defective
            else math.exp(
                -pd.beta**2 * plan_.eps0**2 * plan_.n_steps / (4.0 * diam**2)
            )
        )
        ok &= tail_coef * tail <= gamma / 4.0 * (1.0 + 1e-9)

    c1 = grid_entropy(pd, plan_.n_steps, plan_.grid_factor)
    c2 = hoeffding_range(pd, plan_.n_steps)
    need = 16.0 * (c1 + math.log(2.0 / plan_.eta)) * c2**2 / (9.0 * gamma**2)
    ok &= plan_.n_walks >= need - 1.0
    return bool(ok)
