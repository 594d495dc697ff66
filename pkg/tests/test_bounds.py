import math

import numpy as np
import pytest

from spherewalk import (
    ProblemData,
    annulus_exit_bound,
    bias_a,
    expectation_bound,
    grid_entropy,
    hoeffding_range,
    l2_mean_bound,
    mgf_diagnostic,
    plan,
    plan_satisfies,
    point_tail_bound,
    shell_tail_defective,
    shell_tail_general,
    tail_bound,
    v_sup_bound,
)


def unit_pd(**over):
    base = dict(
        dim=4, diam=2.0, g_inf=1.0, g_alpha=1.0, alpha=1.0,
        f_inf=1.0, f_alpha=1.0, adiam=2.0, delta=0.0, beta=1.0, r_lip=1.0,
    )
    base.update(over)
    return ProblemData(**base)


def test_v_sup_bound():
    assert v_sup_bound(unit_pd(dim=4, diam=2.0)) == pytest.approx(1.0)


def test_annulus_exit_bound_formula():
    assert annulus_exit_bound(1.0, 2.0, 0.1) == pytest.approx(0.2)
    assert annulus_exit_bound(1.0, 2.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        annulus_exit_bound(2.0, 1.0, 0.1)


def test_annulus_exit_bound_dominates_closed_form():
    # radial mean exit time: v(|x|) = -2 w(|x|) with
    # w(r) = r^2/(2n) + C1 r^(2-n) + C2, w(R0) = w(R1) = 0
    r0, r1, n = 1.0, 2.0, 3
    c1 = (r1**2 - r0**2) / (2 * n * (r0 ** (2 - n) - r1 ** (2 - n)))
    c2 = -(r0**2 / (2 * n) + c1 * r0 ** (2 - n))
    for r in np.linspace(1.0001, 1.9999, 100):
        v = -2.0 * (r**2 / (2 * n) + c1 * r ** (2 - n) + c2)
        dist = min(r - r0, r1 - r)
        assert v <= annulus_exit_bound(r0, r1, dist) + 1e-12
        assert v >= -1e-12


def test_shell_tail_general():
    pd = unit_pd()
    assert shell_tail_general(0, 1e-3, pd) == 1.0
    # beta = 1, eps = diam: bound is 2 e^{-M/4}
    pdd = unit_pd(beta=1.0)
    for m in (4, 40):
        assert shell_tail_general(m, pdd.diam, pdd) == pytest.approx(
            min(1.0, 2.0 * math.exp(-m / 4.0))
        )


def test_shell_tail_defective_frozen_value():
    # displayed-rate arithmetic: d=20, M=1000, r(x)=0.5, eps=1e-3 gives
    # (1 - 1/80)^1000 sqrt(500)
    pd = unit_pd(dim=20)
    val = shell_tail_defective(1000, 1e-3, 0.5, pd, displayed_rate=True)
    frozen = (1.0 - 1.0 / 80.0) ** 1000 * math.sqrt(500.0)
    assert val == pytest.approx(frozen, rel=1e-12)
    assert val == pytest.approx(7.69e-5, rel=2e-3)
    # proof-faithful default is weaker (larger), as it must be
    assert shell_tail_defective(1000, 1e-3, 0.5, pd) > val
    assert shell_tail_defective(0, 1e-3, 1e-3, pd) == 1.0
    with pytest.raises(ValueError):
        shell_tail_defective(10, 1e-3, 0.5, unit_pd(delta=None))


def test_bias_a_zero_data():
    pd = unit_pd(g_inf=0.0, g_alpha=0.0, f_inf=0.0, f_alpha=0.0)
    assert bias_a(pd, 10, 5, 0.01) == 0.0


def test_bias_a_monotone():
    pd = unit_pd()
    vals_m = [bias_a(pd, m, 10, 0.01) for m in (1, 10, 100, 1000)]
    assert all(a >= b for a, b in zip(vals_m, vals_m[1:]))
    vals_k = [bias_a(pd, 50, k, 0.01) for k in (1, 10, 100)]
    assert all(a >= b for a, b in zip(vals_k, vals_k[1:]))


def test_bias_a_limit_zero():
    # along a coupled sequence (eps -> 0, M ~ eps^-3 so eps^2 M -> inf,
    # K -> inf) every term vanishes, monotonically
    pd = unit_pd()
    vals = []
    for k in range(1, 7):
        eps = 10.0 ** (-k)
        m = math.ceil(eps**-3)
        vals.append(bias_a(pd, m, 10**k, eps))
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-2


def test_bias_a_variants():
    pd = unit_pd(lap_g_inf=2.0)
    a_gen = bias_a(pd, 100, 10, 0.01)
    a_c2 = bias_a(pd, 100, 10, 0.01, c2_smooth=True)
    assert a_gen > 0 and a_c2 > 0
    a_def = bias_a(pd, 100, 10, 0.01, defective=True)
    assert a_def > 0
    with pytest.raises(ValueError):
        bias_a(unit_pd(adiam=None), 10, 5, 0.01)  # eps_adiam without adiam
    assert bias_a(unit_pd(adiam=None), 10, 5, 0.01, v_surrogate="diam_sq") > 0
    assert bias_a(pd, 10, 5, 0.01, v_surrogate=0.25) > 0


def test_tail_bound_vacuous_and_decay():
    pd = unit_pd()
    a_val = bias_a(pd, 50, 10, 0.01)
    assert tail_bound(a_val * 0.5, 1000, 50, 10, 0.01, pd) == 1.0
    big_gamma = a_val + 1.0
    vals = [tail_bound(big_gamma, n, 50, 10, 0.01, pd) for n in (10**4, 10**6, 10**8)]
    assert vals[-1] < 1e-6 or vals[-1] < vals[0]
    huge_n = 10 ** math.ceil(
        math.log10(2 * (grid_entropy(pd, 50, 10) + 50) * hoeffding_range(pd, 50) ** 2)
    )
    assert tail_bound(big_gamma, huge_n, 50, 10, 0.01, pd) < 1.0


def test_tail_bound_consistency_with_point_hoeffding():
    # at K = 1 the grid bound exceeds the single-point bound by exactly
    # the entropy factor e^{C1} (before clamping)
    pd = unit_pd(g_inf=0.5, f_inf=0.0, f_alpha=0.0, g_alpha=0.0)
    gamma, n, m = 0.4, 50, 3
    pt = point_tail_bound(gamma, n, m, pd)
    c1 = grid_entropy(pd, m, 1)
    a_val = bias_a(pd, m, 1, 0.01)
    full = 2.0 * math.exp(c1 - n * (gamma - a_val) ** 2 / hoeffding_range(pd, m) ** 2)
    # direct identity when gamma - A ~ gamma (g_alpha = f = 0 kills A's grid
    # and proximity terms; only the tail term remains)
    assert math.log(full) - math.log(2.0 * math.exp(-n * (gamma - a_val) ** 2 / hoeffding_range(pd, m) ** 2)) == pytest.approx(c1)
    assert pt <= 1.0


def test_tail_bound_denominator_flag():
    pd = unit_pd()
    g = bias_a(pd, 50, 10, 0.01) + 0.5
    sq = tail_bound(g, 10**7, 50, 10, 0.01, pd, squared_denominator=True)
    un = tail_bound(g, 10**7, 50, 10, 0.01, pd, squared_denominator=False)
    assert un <= sq  # unsquared denominator decays faster here (C2 > 1)


def test_expectation_bound():
    pd = unit_pd(g_inf=0.0, g_alpha=0.0, f_inf=0.0, f_alpha=0.0)
    assert expectation_bound(100, 10, 5, 0.01, pd) == 0.0
    pd = unit_pd()
    vals = [expectation_bound(n, 50, 10, 0.01, pd) for n in (10, 1000, 10**5)]
    assert vals[0] > vals[1] > vals[2]


def test_l2_mean_bound_round_numbers():
    pd = unit_pd(g_inf=1.0, f_inf=0.0)
    assert l2_mean_bound(100, 10, pd, volume=1.0, sup_bias=0.0) == pytest.approx(0.04)
    assert l2_mean_bound(10**9, 10, pd, 1.0, 0.0) < 1e-7


def test_mgf_diagnostic():
    pd = unit_pd(dim=10)
    rate = 1.0 - 1.0 / (2.0**3.5 * 10)
    assert mgf_diagnostic(1.0001, 0.0, 1e-3, pd) == pytest.approx(1.0, abs=1e-10)
    lim = 1.0 + np.sqrt(0.25) / ((1 - rate) * np.sqrt(1e-2))
    assert mgf_diagnostic(1.0 + 1e-9, 0.25, 1e-2, pd) == pytest.approx(lim, rel=1e-4)
    with pytest.raises(ValueError):
        mgf_diagnostic(0.5, 0.1, 1e-3, pd)
    with pytest.raises(ValueError):
        mgf_diagnostic(1.0 / rate + 0.1, 0.1, 1e-3, pd)


def test_plan_resubstitution_and_errors():
    pd = unit_pd()
    for defective in (False, True):
        p = plan(0.2, 0.05, pd, defective=defective)
        assert plan_satisfies(p, pd)
        assert p.n_steps >= 1 and p.n_walks >= 1 and p.grid_factor >= 1
    with pytest.raises(ValueError):
        plan(0.1, 0.05, unit_pd(adiam=None))
    with pytest.raises(ValueError):
        plan(0.1, 0.05, unit_pd(delta=None), defective=True)
    with pytest.raises(ValueError):
        plan(0.1, 1.5, pd)


def test_plan_monotone_in_targets():
    pd = unit_pd()
    rng = np.random.default_rng(0)
    for _ in range(100):
        gamma = 10 ** rng.uniform(-2, -0.3)
        eta = 10 ** rng.uniform(-3, -0.5)
        a = plan(gamma, eta, pd, defective=True)
        b = plan(2 * gamma, eta, pd, defective=True)
        assert b.n_steps <= a.n_steps and b.n_walks <= a.n_walks
        c = plan(gamma, min(2 * eta, 0.99), pd, defective=True)
        assert c.n_walks <= a.n_walks


def test_problem_data_validation():
    with pytest.raises(ValueError):
        unit_pd(alpha=0.0)
    with pytest.raises(ValueError):
        unit_pd(beta=1.5)
    with pytest.raises(ValueError):
        unit_pd(delta=1.0)
    with pytest.raises(ValueError):
        unit_pd(g_inf=-1.0)
