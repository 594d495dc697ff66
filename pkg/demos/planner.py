"""Parameter planning across dimensions.

For a fixed target (error 0.1, confidence 95%) the planner picks the
shell width, grid factor, step count and walk count from the closed-form
rules.  On domains with an exterior ball the defective path gives step
counts growing like d log d; the general path pays 1/eps0^2.
"""

import spherewalk as sw

print(f"{'d':>4s} {'eps0':>12s} {'K':>8s} {'steps M':>9s} {'walks N':>12s}")
for d in (4, 8, 16, 32, 64):
    pd = sw.ProblemData(
        dim=d, diam=2.0, adiam=2.0, delta=0.0, beta=1.0,
        g_inf=1.0, g_alpha=1.0, alpha=1.0, f_inf=1.0, f_alpha=1.0,
    )
    p = sw.plan(0.1, 0.05, pd, defective=True)
    assert sw.plan_satisfies(p, pd)
    print(f"{d:4d} {p.eps0:12.3e} {p.grid_factor:8d} {p.n_steps:9d} {p.n_walks:12.3e}")

print("\ngeneral-domain path (no defective rate) for comparison:")
pd = sw.ProblemData(dim=8, diam=2.0, adiam=2.0, g_inf=1.0, g_alpha=1.0, f_inf=1.0)
p = sw.plan(0.1, 0.05, pd, defective=False)
print(f"   d=8: M = {p.n_steps:.3g}, N = {p.n_walks:.3g}")
