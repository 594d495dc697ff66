"""Realize the walk estimator as one explicit ReLU network.

With the exact hypercube distance net as the walk radius, affine data
nets and frozen random draws, the ten-step twenty-walk estimator becomes
a single feed-forward network whose evaluation reproduces the Monte
Carlo values up to the product-net tolerance.  The size accounting is
audited against the constructive bounds.
"""

import numpy as np

import spherewalk as sw
from spherewalk import nn

dim, n_steps, n_walks = 4, 6, 10
dom = sw.Domain.hypercube(1.0, dim)

r_net = nn.hypercube_distance_net(1.0, dim)
g_net = nn.affine_net(np.array([[1.0, 0.0, 0.0, 0.0]]), np.array([0.0]))  # g = x1
f_net = nn.affine_net(np.zeros((1, dim)), np.array([1.0]))                # f = 1

omega = nn.FrozenRandomness(seed=99, n_steps=n_steps, n_walks=n_walks, dim=dim)
eps_p = 1e-9
unet, audit = nn.assemble_solution_net(
    dom, omega, g_net, f_net, r_net,
    eps_r=0.0, eps_p=eps_p, c=max(dom.diameter, 2.0),
)
print(f"network: {unet}")
print(f"size audit: measured {audit.measured} <= bound {audit.bound:.3g} -> {audit.ok}")

cfg = sw.WosConfig(
    dom, sw.surrogate_from_exact(dom),
    sw.Field.constant(1.0, dim), sw.Field.linear([1.0], dim),
    n_steps, n_walks, seed=99,
)
probe = sw.uniform_points(3, dom, 50)
gap = np.abs(unet(probe)[:, 0] - sw.estimate(probe, cfg).values).max()
budget = n_steps * eps_p * 3.0 / dim
print(f"max |network - estimator| over 50 probes: {gap:.3e} (budget {budget:.1e})")

# the JSON document is portable; it stores layers densely, so export is
# meant for small nets (the full assembly above would be hundreds of MB)
walk_map = nn.chain_net(r_net, omega.directions()[0])
doc = walk_map.to_json()
clone = nn.ReluNet.from_json(doc)
print(f"walk-map json round trip: {np.array_equal(clone(probe), walk_map(probe))} "
      f"({len(doc) / 1e3:.0f} kB)")
