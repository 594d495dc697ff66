"""Solve the unit-source Dirichlet problem on a ball and check the answer.

The problem (1/2) lap u = -1 in the unit ball, u = 0 on the sphere, has
the closed-form solution u(x) = (1 - |x|^2) / d, which makes the ball
the canonical correctness oracle for the walk estimator.
"""

import numpy as np

import spherewalk as sw
from spherewalk.fields import ball_unit_source_solution

dim = 3
dom = sw.Domain.ball(1.0, dim)

# plan the number of walk steps for a 0.1 target error at 95% confidence
pd = sw.ProblemData(dim=dim, diam=2.0, adiam=2.0, delta=0.0, beta=1.0, f_inf=1.0)
plan = sw.plan(gamma=0.1, eta=0.05, pd=pd, defective=True)
print(f"planned steps per walk: {plan.n_steps} (planned walks: {plan.n_walks:.3g})")

cfg = sw.WosConfig(
    domain=dom,
    surrogate=sw.surrogate_from_exact(dom),
    f=sw.Field.constant(1.0, dim),
    g=sw.Field.zero(dim),
    n_steps=plan.n_steps,
    n_walks=50_000,
    seed=7,
)

points = np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.8, 0.0]])
res = sw.estimate(points, cfg)
exact = ball_unit_source_solution(1.0, dim)(points)

print(f"{'point':24s} {'estimate':>10s} {'exact':>10s} {'stderr':>9s}")
for x, v, e, s in zip(points, res.values, exact, res.stderr):
    print(f"{str(x.tolist()):24s} {v:10.6f} {e:10.6f} {s:9.2e}")
