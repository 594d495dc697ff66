import json
import math

import numpy as np
import pytest
import scipy.sparse as sp

import spherewalk as sw
from spherewalk import nn


def random_net(rng, d_in, d_out, depth, width=6, density=0.7):
    dims = [d_in] + [int(rng.integers(2, width + 1)) for _ in range(depth - 1)] + [d_out]
    layers = []
    for a, b in zip(dims, dims[1:]):
        w = rng.normal(size=(b, a)) * (rng.random((b, a)) < density)
        layers.append((w, rng.normal(size=b) * 0.3))
    return nn.ReluNet(layers)


def naive_eval(net, x):
    z = np.asarray(x, dtype=float)
    for i, (w, b) in enumerate(net.layers):
        z = w.toarray() @ z + b
        if i != len(net.layers) - 1:
            z = np.maximum(z, 0.0)
    return z


# ---------------------------------------------------------------------------
# net type
# ---------------------------------------------------------------------------

def test_eval_identity_construction():
    idn = nn.identity_net(4, depth=5)
    rng = np.random.default_rng(0)
    X = rng.normal(size=(1000, 4))
    assert np.array_equal(idn(X), X)


def test_eval_single_relu():
    net = nn.ReluNet([(np.array([[1.0]]), [0.0]), (np.array([[1.0]]), [0.0])])
    assert net(np.array([-1.0]))[0] == 0.0
    assert net(np.array([2.0]))[0] == 2.0


def test_eval_matches_naive_interpreter():
    rng = np.random.default_rng(1)
    net = random_net(rng, 4, 2, 3)
    for _ in range(50):
        x = rng.normal(size=4)
        assert np.abs(net(x) - naive_eval(net, x)).max() < 1e-14


def test_accounting_counts_nonzeros():
    net = nn.ReluNet([(np.array([[1.0, 0.0], [0.0, 2.0]]), [0.0, 3.0])])
    assert net.size == 3
    assert net.width == 2 and net.depth == 1


def test_json_round_trip():
    rng = np.random.default_rng(2)
    net = random_net(rng, 3, 2, 4)
    clone = nn.ReluNet.from_json(net.to_json())
    assert clone.dims == net.dims and clone.size == net.size
    X = rng.normal(size=(20, 3))
    assert np.array_equal(clone(X), net(X))
    doc = json.loads(net.to_json())
    assert set(doc) == {"dims", "layers"}
    assert set(doc["layers"][0]) == {"w", "b"}


def test_dimension_errors():
    with pytest.raises(ValueError):
        nn.ReluNet([(np.ones((2, 3)), np.zeros(2)), (np.ones((2, 4)), np.zeros(2))])
    net = nn.identity_net(3)
    with pytest.raises(ValueError):
        net(np.zeros(4))


# ---------------------------------------------------------------------------
# calculus ops: exact semantics + lemma bounds
# ---------------------------------------------------------------------------

def test_compose_semantics_and_bounds():
    rng = np.random.default_rng(3)
    for _ in range(40):
        inner = random_net(rng, 3, int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        outer = random_net(rng, inner.output_dim, 2, int(rng.integers(1, 4)))
        comp = nn.compose(outer, inner)
        X = rng.normal(size=(30, 3))
        assert np.abs(comp(X) - outer(inner(X))).max() < 1e-12
        assert comp.depth == outer.depth + inner.depth
        d1 = inner.output_dim
        assert comp.size <= min(
            outer.size + inner.size + d1 * (outer.width + inner.width) + d1,
            2 * outer.size + 2 * inner.size,
        )
        assert comp.width <= max(outer.width, inner.width, 2 * d1)


def test_compose_with_identity():
    rng = np.random.default_rng(4)
    net = random_net(rng, 3, 2, 2)
    comp = nn.compose(net, nn.identity_net(3))
    X = rng.normal(size=(20, 3))
    assert np.abs(comp(X) - net(X)).max() < 1e-13


def test_linear_combine():
    rng = np.random.default_rng(5)
    nets = [random_net(rng, 3, 1, 3) for _ in range(4)]
    coeffs = [1.5, -2.0, 0.25, 1.0]
    combo = nn.linear_combine(nets, coeffs)
    X = rng.normal(size=(40, 3))
    want = sum(a * n(X) for a, n in zip(coeffs, nets))
    assert np.abs(combo(X) - want).max() < 1e-12
    assert combo.depth == nets[0].depth
    assert combo.size <= sum(n.size for n in nets)
    assert combo.width <= sum(n.width for n in nets)

    single = nn.linear_combine([nets[0]], [1.0])
    assert np.abs(single(X) - nets[0](X)).max() == 0.0
    cancel = nn.linear_combine([nets[0], nets[0]], [1.0, -1.0])
    assert np.abs(cancel(X)).max() < 1e-12


def test_linear_combine_depth_mismatch():
    rng = np.random.default_rng(6)
    with pytest.raises(ValueError):
        nn.linear_combine([random_net(rng, 2, 1, 1), random_net(rng, 2, 1, 3)], [1, 1])


def test_augment():
    rng = np.random.default_rng(7)
    for _ in range(25):
        net = random_net(rng, 3, 2, int(rng.integers(1, 4)))
        L = net.depth + int(rng.integers(1, 5))
        aug = nn.augment(net, L)
        X = rng.normal(size=(30, 3))
        assert np.array_equal(aug(X), net(X)) or np.abs(aug(X) - net(X)).max() == 0.0
        assert aug.depth == L
        d1 = net.output_dim
        assert aug.size <= min(net.size + d1 * net.width + d1, 2 * net.size) + 2 * d1 * (
            L - net.depth
        )
    with pytest.raises(ValueError):
        nn.augment(net, net.depth)


def test_randomized_calculus_bound_sweep():
    # criterion-level sweep: 1000 randomized op applications, all lemma
    # bounds asserted inside the ops themselves
    rng = np.random.default_rng(8)
    for _ in range(250):
        a = random_net(rng, 3, 2, int(rng.integers(1, 4)))
        b = random_net(rng, 3, 2, a.depth)
        c = random_net(rng, a.output_dim, 1, int(rng.integers(1, 3)))
        nn.compose(c, a)
        nn.linear_combine([a, b], [0.7, -0.3])
        nn.augment(a, a.depth + 2)
        nn.stack_parallel([a, random_net(rng, 3, 1, int(rng.integers(1, 5)))])


# ---------------------------------------------------------------------------
# constructive blocks
# ---------------------------------------------------------------------------

def test_square_net_error_curve():
    t = np.linspace(0, 1, 4001)[:, None]
    for m in (0, 1, 4, 9):
        err = np.abs(nn.square_net(m)(t)[:, 0] - t[:, 0] ** 2).max()
        assert err <= nn.square_error(m) + 1e-15


@pytest.mark.parametrize("c", [1.0, 10.0])
@pytest.mark.parametrize("delta", [1e-2, 1e-4, 1e-6])
def test_product_net_grid(c, delta):
    net = nn.product_net(c, delta)
    g = np.linspace(-c, c, 201)
    A, B = np.meshgrid(g, g)
    pts = np.stack([A.ravel(), B.ravel()], axis=1)
    vals = net(pts)[:, 0]
    assert np.abs(vals - A.ravel() * B.ravel()).max() <= delta
    # zero line: |net(a, 0)| <= delta
    line = np.stack([g, np.zeros_like(g)], axis=1)
    assert np.abs(net(line)[:, 0]).max() <= delta
    # symmetric construction
    assert np.abs(net(pts)[:, 0] - net(pts[:, ::-1].copy())[:, 0]).max() <= 2 * delta


def test_product_net_size_scaling():
    # O(log(1/delta)): equal decade steps add a near-constant increment
    sizes = [nn.product_net(1.0, 10.0**-k).size for k in (2, 4, 6, 8)]
    diffs = np.diff(sizes)
    assert (diffs > 0).all()
    assert diffs.max() <= 1.5 * diffs.min()
    kappa = nn.KAPPA_PRODUCT
    for k, s in zip((2, 4, 6, 8), sizes):
        assert s <= kappa * (math.log2(10.0**k) + math.log2(2.0) + 1.0)


def test_piecewise_linear_net():
    t = np.array([0.0, 1.0, 2.0, 3.5])
    v = np.array([1.0, 1.0, 0.25, 0.0])
    net = nn.piecewise_linear_net(t, v)
    x = np.linspace(-1, 5, 500)[:, None]
    want = np.interp(x[:, 0], t, v)
    assert np.abs(net(x)[:, 0] - want).max() < 1e-13


def test_hypercube_distance_net_exact():
    rng = np.random.default_rng(9)
    for d, h in ((1, 1.0), (3, 0.7), (10, 1.0)):
        net = nn.hypercube_distance_net(h, d)
        dom = sw.Domain.hypercube(h, d)
        X = rng.uniform(-h, h, (2000, d))
        assert np.abs(net(X)[:, 0] - dom.distance_many(X)).max() < 1e-12
        face = np.zeros(d)
        face[0] = h
        assert net(face)[0] == pytest.approx(0.0, abs=1e-15)
        assert net(np.full(d, 0.3))[0] == pytest.approx(h - 0.3, abs=1e-14)


def test_relu_shift_net():
    base = nn.hypercube_distance_net(1.0, 3)
    shifted = nn.relu_shift_net(base, 0.25)
    rng = np.random.default_rng(10)
    X = rng.uniform(-1, 1, (500, 3))
    want = np.maximum(base(X)[:, 0] - 0.25, 0.0)
    assert np.abs(shifted(X)[:, 0] - want).max() < 1e-13
    assert shifted.depth == base.depth + 1
    assert shifted.size <= base.size + 2


def test_step_net_edges():
    rng = np.random.default_rng(11)
    d = 4
    phi = random_net(rng, d, 1, 2)
    X = rng.normal(size=(100, d))
    # zero net and zero direction both give the identity map
    zero_phi = nn.affine_net(np.zeros((1, d)), [0.0])
    assert np.abs(nn.step_net(zero_phi, rng.normal(size=d))(X) - X).max() < 1e-13
    assert np.abs(nn.step_net(phi, np.zeros(d))(X) - X).max() < 1e-13
    v = rng.normal(size=d)
    got = nn.step_net(phi, v)(X)
    want = X + phi(X) * v  # phi returns (n, 1)
    assert np.abs(got - want).max() < 1e-12


def test_chain_net_matches_walk_oracle():
    d, m = 4, 7
    dom = sw.Domain.hypercube(1.0, d)
    rnet = nn.hypercube_distance_net(1.0, d)
    dirs = sw.sampling.direction_block(33, 0, 1, m, d)[0]
    theta = nn.chain_net(rnet, dirs)
    cfg = sw.WosConfig(
        dom, sw.surrogate_from_exact(dom), sw.Field.zero(d), sw.Field.zero(d), m, 1, seed=33
    )
    pts = sw.uniform_points(12, dom, 100)
    for x in pts:
        term, _ = sw.run_trajectory(x, 0, cfg)
        assert np.abs(theta(x) - term).max() < 1e-10
    assert theta.depth == m * (rnet.depth + 1) + 1
    assert nn.chain_net(rnet, np.zeros((0, d)))(pts[0]) is not None


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def assemble_instance(seed=123, d=5, m=10, n=20, eps_p=1e-10, f_const=1.0):
    dom = sw.Domain.hypercube(1.0, d)
    omega = nn.FrozenRandomness(seed=seed, n_steps=m, n_walks=n, dim=d)
    r_net = nn.hypercube_distance_net(1.0, d)
    gw = np.zeros((1, d))
    gw[0, 0] = 0.5
    gw[0, 1] = -0.25
    g_net = nn.affine_net(gw, np.array([0.05]))
    f_net = None if f_const == 0.0 else nn.affine_net(np.zeros((1, d)), np.array([f_const]))
    c = max(dom.diameter, 2.0 * abs(f_const))
    unet, audit = nn.assemble_solution_net(
        dom, omega, g_net, f_net, r_net, eps_r=0.0, eps_p=eps_p, c=c
    )
    g_field = sw.Field.linear([0.5, -0.25], d, const=0.05)
    f_field = sw.Field.constant(f_const, d) if f_const else sw.Field.zero(d)
    cfg = sw.WosConfig(
        dom, sw.surrogate_from_exact(dom), f_field, g_field, m, n, seed=seed
    )
    return dom, unet, audit, cfg


def test_assembled_net_no_source_is_exact():
    dom, unet, audit, cfg = assemble_instance(f_const=0.0, m=6, n=8)
    pts = sw.uniform_points(5, dom, 50)
    ref = sw.estimate(pts, cfg).values
    assert np.abs(unet(pts)[:, 0] - ref).max() < 1e-11
    assert audit.ok


def test_assembled_net_matches_estimator_within_budget():
    dom, unet, audit, cfg = assemble_instance()
    pts = sw.uniform_points(7, dom, 100)
    ref = sw.estimate(pts, cfg).values
    err = np.abs(unet(pts)[:, 0] - ref)
    budget = cfg.n_steps * 1e-10 * (1.0 + 2.0 * 1.0) / dom.dim
    assert err.max() <= budget
    rel = (err / np.abs(ref)).max()
    assert rel <= 1e-6
    assert audit.ok and unet.size <= audit.bound


def test_assembly_budget_guard():
    d = 5
    dom = sw.Domain.hypercube(1.0, d)
    omega = nn.FrozenRandomness(seed=1, n_steps=10, n_walks=20, dim=d)
    r_net = nn.hypercube_distance_net(1.0, d)
    g_net = nn.affine_net(np.zeros((1, d)), np.array([0.0]))
    f_net = nn.affine_net(np.zeros((1, d)), np.array([1.0]))
    with pytest.raises(nn.AssemblyBudgetError):
        nn.assemble_solution_net(
            dom, omega, g_net, f_net, r_net, 0.0, 1e-10, 5.0, param_cap=1000
        )


def test_frozen_randomness_matches_sampling():
    om = nn.FrozenRandomness(seed=77, n_steps=4, n_walks=3, dim=5)
    assert np.array_equal(om.directions(), sw.sampling.direction_block(77, 0, 3, 4, 5))
    assert np.array_equal(om.green_points(), sw.sampling.green_block(77, 0, 3, 5))


# ---------------------------------------------------------------------------
# boundary extension as a net
# ---------------------------------------------------------------------------

def fibonacci_directions(count):
    k = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * k / count)
    theta = np.pi * (1 + 5**0.5) * k
    return np.stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)], axis=1
    )


def norm_lower_net(dirs, bound):
    """max_k |<x, u_k>| as a net: C - min_k (C - <x, +-u_k>)."""
    rows = np.vstack([dirs, -dirs])
    head = nn.affine_net(sp.csr_matrix(-rows), np.full(len(rows), bound))
    tree = nn.min_tree_net(len(rows))
    return nn.scale_output(nn.compose(tree, head), -1.0, bound)


def test_extension_net_constant_data():
    # all components exact, g = const: deep interior evaluates to ~0
    d = 3
    dom = sw.Domain.ball(1.0, d)
    dirs = fibonacci_directions(160)
    nrm = norm_lower_net(dirs, 2.0)
    r_net = nn.scale_output(nrm, -1.0, 1.0)  # 1 - |x| (up to angular gap)
    eps0 = 0.05
    knots = np.linspace(0.0, 3.5, 141)
    psi_net = nn.piecewise_linear_net(knots, sw.cutoff_profile(knots))
    g_net = nn.affine_net(np.zeros((1, d)), np.array([2.0]))
    pi_net = nn.identity_net(d)  # irrelevant for constant g
    gext = nn.extension_net(psi_net, r_net, g_net, pi_net, eps0, delta_bar=0.05, c=2.5)
    deep = np.array([[0.1, 0.0, 0.0], [0.0, 0.2, 0.1]])
    assert np.abs(gext(deep)[:, 0]).max() <= 0.05
    near = np.array([[0.97, 0.0, 0.0]])
    assert gext(near)[0, 0] == pytest.approx(2.0, abs=0.08)


def test_extension_net_matches_cutoff_extension():
    # ball, g(y) = y1: every component discretized as a net with a
    # computable sup error; the product of errors is delta_bar
    d = 3
    dom = sw.Domain.ball(1.0, d)
    eps0 = 0.05
    dirs = fibonacci_directions(400)
    # empirical angular defect of the direction net, with margin
    rng = np.random.default_rng(12)
    Z = rng.normal(size=(100_000, d))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    gap = 1.0 - np.abs(Z @ dirs.T).max(axis=1).min()
    delta_r = 1.3 * gap  # sup_x ||x| - nrm(x)| <= gap * |x|, |x| <= 1

    nrm = norm_lower_net(dirs, 2.0)
    r_net = nn.scale_output(nrm, -1.0, 1.0)
    knots = np.linspace(0.0, 3.5, 301)
    psi_net = nn.piecewise_linear_net(knots, sw.cutoff_profile(knots))
    delta_psi = (knots[1] - knots[0]) ** 2 / 8.0
    g_net = nn.affine_net(np.array([[1.0, 0.0, 0.0]]), np.array([0.0]))
    delta_g = 0.0

    # projection net: pi(x) ~ x (2 - nrm(x)/R), one product per coordinate
    delta_pp = 1e-6
    coords = []
    for i in range(d):
        sel = np.zeros((1, d))
        sel[0, i] = 1.0
        pair = nn.stack_parallel(
            [nn.affine_net(sel), nn.scale_output(nrm, -1.0, 2.0)]
        )
        coords.append(nn.compose(nn.product_net(2.0, delta_pp), pair))
    depth = max(cn.depth for cn in coords)
    coords = [cn if cn.depth == depth else nn.augment(cn, depth) for cn in coords]
    pi_net = nn.stack_parallel(coords)
    # on the cutoff band r <= 3 eps0: |pi - pi_net| per coordinate is
    # bounded by the quadratic defect plus the norm-net and product errors
    delta_pi = np.sqrt(d) * ((3 * eps0) ** 2 + delta_r + delta_pp)

    g_inf, grad_g = 1.0, 1.0
    delta_bar = 2 * (3 * delta_psi + delta_r / eps0) * g_inf + 2 * (
        3 * delta_g + grad_g * delta_pi
    ) * (delta_psi + 1.0)

    gext = nn.extension_net(psi_net, r_net, g_net, pi_net, eps0, delta_bar, c=2.0)
    exact = sw.extend_boundary_data(dom, lambda Y: Y[:, 0], eps0)

    # 1e3 boundary-layer points
    U = rng.normal(size=(1000, d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    radii = 1.0 - rng.uniform(0.0, 3.2 * eps0, 1000)
    X = U * radii[:, None]
    err = np.abs(gext(X)[:, 0] - exact(X))
    assert err.max() <= delta_bar, (err.max(), delta_bar)
