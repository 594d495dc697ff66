"""Command-line front end: solve, plan, test1, test2, assemble-nn.

Configuration is a flat key-value JSON file (keys like ``domain.kind``);
command-line flags override the seed and thread count.  CSV output uses
a comma separator, '.' decimals, a header row and LF line endings, with
shortest round-trip float formatting, so identical runs produce
byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 bound-assertion failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import bounds, nn
from .expr import ExprError, expr_field
from .fields import Field, catalog_field
from .geometry import Domain, DomainKind, surrogate_from_exact
from .sampling import uniform_points
from .wos import WosConfig, estimate, exit_stats

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSERTION = 3


class ConfigError(ValueError):
    pass


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object of flat keys")
    return doc


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing config key {key!r}")
    return cfg[key]


def _domain(cfg: dict) -> Domain:
    kind = str(_need(cfg, "domain.kind")).lower()
    dim = int(_need(cfg, "domain.dim"))
    try:
        if kind == "hypercube":
            return Domain.hypercube(float(_need(cfg, "domain.halfwidth")), dim)
        if kind == "annular_hypercube":
            return Domain.annular_hypercube(
                float(_need(cfg, "domain.halfwidth")),
                float(_need(cfg, "domain.l1_radius")),
                dim,
            )
        if kind == "ball":
            return Domain.ball(float(_need(cfg, "domain.radius")), dim)
        if kind == "annulus":
            return Domain.annulus(
                float(_need(cfg, "domain.r0")), float(_need(cfg, "domain.r1")), dim
            )
    except ValueError as e:
        raise ConfigError(f"domain.*: {e}") from e
    raise ConfigError(f"domain.kind: unknown kind {kind!r}")


def _field(cfg: dict, key: str, dim: int, default: Optional[str] = None) -> Field:
    spec = cfg.get(key, default) if default is not None else _need(cfg, key)
    if not isinstance(spec, str):
        raise ConfigError(f"{key}: expected a catalog name or 'expr:...' string")
    try:
        if spec.startswith("expr:"):
            return expr_field(spec[5:], dim)
        name = spec[8:] if spec.startswith("catalog:") else spec
        return catalog_field(name, dim)
    except (ExprError, KeyError, ValueError) as e:
        raise ConfigError(f"{key}: {e}") from e


def _csv_write(path: Optional[str], header, rows):
    def fmt(v):
        if isinstance(v, str):
            return v
        if v is None:
            return ""
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return repr(float(v))

    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _wos_config(cfg: dict, dom: Domain, seed: Optional[int], steps_key="solver.n_steps",
                walks_key="solver.n_walks", default_field: Optional[str] = None) -> WosConfig:
    f = _field(cfg, "problem.f", dom.dim, default=default_field)
    g = _field(cfg, "problem.g", dom.dim, default=default_field)
    use_seed = seed if seed is not None else int(cfg.get("solver.seed", 0))
    try:
        return WosConfig(
            dom,
            surrogate_from_exact(dom),
            f,
            g,
            int(_need(cfg, steps_key)),
            int(_need(cfg, walks_key)),
            use_seed,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def run_solve(cfg: dict, seed, threads, out) -> int:
    dom = _domain(cfg)
    wcfg = _wos_config(cfg, dom, seed)
    spec = _need(cfg, "solve.points")
    if isinstance(spec, dict) and "uniform" in spec:
        pts = uniform_points(wcfg.seed, dom, int(spec["uniform"]))
    elif isinstance(spec, list):
        pts = np.asarray(spec, dtype=float)
    else:
        raise ConfigError("solve.points: expected a list of points or {'uniform': n}")
    res = estimate(pts, wcfg, threads=threads)
    header = [f"x{i + 1}" for i in range(dom.dim)] + ["estimate", "stderr"]
    rows = [list(p) + [v, s] for p, v, s in zip(pts, res.values, res.stderr)]
    if "problem.exact" in cfg:
        exact = _field(cfg, "problem.exact", dom.dim)(pts)
        header.append("exact")
        rows = [r + [e] for r, e in zip(rows, exact)]
    if "bounds.eps" in cfg:
        bias, hoeff = _solve_bounds(cfg, dom, wcfg)
        header += ["bias_bound", "hoeffding_99"]
        rows = [r + [bias, hoeff] for r in rows]
    _csv_write(out, header, rows)
    return EXIT_OK


def _solve_bounds(cfg: dict, dom: Domain, wcfg: WosConfig):
    """Bias bound (stopped walk) and 99% Hoeffding radius for solve output.

    Needs polynomial data so the norms are computable; the exit-time
    surrogate is eps*adiam when the domain has one, else diam^2/d.
    """
    if not (wcfg.f.is_poly2 and wcfg.g.is_poly2):
        raise ConfigError("bounds.eps: bound columns need catalog/polynomial f and g")
    md = dom.metadata()
    eps = float(cfg["bounds.eps"])
    pd = bounds.ProblemData(
        dim=dom.dim, diam=md.diam, adiam=md.adiam, delta=md.delta,
        beta=wcfg.surrogate.beta, r_lip=wcfg.surrogate.lipschitz,
        g_inf=wcfg.g.sup_on(dom), g_alpha=wcfg.g.lipschitz_on(dom), alpha=1.0,
        f_inf=wcfg.f.sup_on(dom), f_alpha=wcfg.f.lipschitz_on(dom),
    )
    surrogate = "eps_adiam" if md.adiam is not None else "diam_sq"
    grid = max(1, int(cfg.get("bounds.grid_factor", 10**6)))
    bias = bounds.bias_a(
        pd, wcfg.n_steps, grid, eps, v_surrogate=surrogate,
        defective=md.delta is not None,
    )
    c2 = bounds.hoeffding_range(pd, wcfg.n_steps)
    hoeff = c2 * math.sqrt(math.log(200.0) / wcfg.n_walks)
    return bias, hoeff


def run_plan(args) -> int:
    try:
        pd = bounds.ProblemData(
            dim=args.dim,
            diam=args.diam,
            g_inf=args.g_inf,
            g_alpha=args.g_alpha,
            alpha=args.alpha,
            f_inf=args.f_inf,
            f_alpha=args.f_alpha,
            adiam=args.adiam,
            delta=args.delta,
            beta=args.beta,
            r_lip=args.r_lip,
        )
        p = bounds.plan(args.gamma, args.eta, pd, defective=args.defective)
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    regime = "defective (geometric shell tail)" if p.defective else "general (exponential shell tail)"
    print(f"regime:      {regime}")
    print(f"eps0:        {p.eps0!r}")
    print(f"grid_factor: {p.grid_factor}")
    print(f"n_steps:     {p.n_steps}")
    print(f"n_walks:     {p.n_walks}")
    print(f"check:       {'ok' if bounds.plan_satisfies(p, pd) else 'FAILED'}")
    return EXIT_OK if bounds.plan_satisfies(p, pd) else EXIT_ASSERTION


def run_test1(cfg: dict, seed, threads, out) -> int:
    dom = _domain(cfg)
    wcfg = _wos_config(
        cfg, dom, seed, steps_key="test1.max_steps", walks_key="test1.n_walks",
        default_field="zero",
    )
    eps = float(_need(cfg, "test1.eps"))
    xspec = _need(cfg, "test1.x")
    if isinstance(xspec, (int, float)):
        x = np.zeros(dom.dim)
        x[0] = float(xspec)
    else:
        x = np.asarray(xspec, dtype=float)
    steps = cfg.get("test1.steps")
    if steps is None:
        steps = list(range(0, int(cfg["test1.max_steps"]) + 1, max(1, int(cfg["test1.max_steps"]) // 20)))
    steps = [int(s) for s in steps]
    surv = exit_stats(x, max(steps), eps, wcfg.n_walks, wcfg, step_checkpoints=steps, threads=threads)

    md = dom.metadata()
    rx = dom.distance(x)
    pd = bounds.ProblemData(dim=dom.dim, diam=md.diam, delta=md.delta, beta=wcfg.surrogate.beta)
    rows = []
    violated = False
    for m in steps:
        p = surv[m]
        se = math.sqrt(max(p * (1.0 - p), 0.0) / wcfg.n_walks)
        if md.delta is not None:
            # raw drift-bound value (not clamped; > 1 bounds trivially)
            ub = bounds.lyapunov_tail(m, eps, rx, pd)
            if p > ub + 3.0 * se:
                violated = True
        else:
            ub = None
        rows.append([dom.dim, m, eps, p, ub, se])
    _csv_write(out, ["d", "M", "epsilon", "empirical_prob", "u_bound", "stderr"], rows)
    return EXIT_ASSERTION if violated else EXIT_OK


def run_test2(cfg: dict, seed, threads, out) -> int:
    dom = _domain(cfg)
    base_seed = seed if seed is not None else int(cfg.get("solver.seed", 0))
    n_sweep = sorted(int(n) for n in _need(cfg, "test2.n_sweep"))
    l_points = int(_need(cfg, "test2.l"))
    e_reps = int(_need(cfg, "test2.e"))
    cfg = dict(cfg)
    cfg["solver.n_walks"] = n_sweep[-1]
    cfg["solver.n_steps"] = cfg.get("test2.n_steps", cfg.get("solver.n_steps"))
    if cfg["solver.n_steps"] is None:
        raise ConfigError("missing config key 'test2.n_steps'")
    exact = _field(cfg, "problem.exact", dom.dim)

    l1 = np.zeros((e_reps, len(n_sweep)))
    sup = np.zeros((e_reps, len(n_sweep)))
    hist_rows = []
    for j in range(e_reps):
        rep_seed = base_seed + j
        pts = uniform_points(rep_seed, dom, l_points)
        wcfg = _wos_config(cfg, dom, rep_seed)
        sweep = estimate(pts, wcfg, threads=threads, checkpoints=n_sweep)
        target = exact(pts)
        for k, n in enumerate(n_sweep):
            err = np.abs(sweep[n].values - target)
            l1[j, k] = err.mean()
            sup[j, k] = err.max()
            if n == n_sweep[-1]:
                hist_rows += [[j, i, e] for i, e in enumerate(err)]

    rows = [
        [n, l1[:, k].mean(), sup[:, k].mean(), l1[:, k].std(ddof=1) if e_reps > 1 else 0.0,
         sup[:, k].std(ddof=1) if e_reps > 1 else 0.0]
        for k, n in enumerate(n_sweep)
    ]
    _csv_write(out, ["n_walks", "err_l1_mean", "err_sup_mean", "err_l1_std", "err_sup_std"], rows)
    if out is not None:
        hist_path = str(Path(out).with_suffix("")) + "_hist.csv"
        _csv_write(hist_path, ["replica", "point", "err"], hist_rows)
    return EXIT_OK


def run_assemble(cfg: dict, seed, threads, out) -> int:
    dom = _domain(cfg)
    use_seed = seed if seed is not None else int(cfg.get("solver.seed", 0))
    m = int(_need(cfg, "assemble.n_steps"))
    n = int(_need(cfg, "assemble.n_walks"))
    eps_p = float(cfg.get("assemble.eps_p", 1e-10))
    cap = int(cfg.get("assemble.param_cap", nn.assemble.DEFAULT_PARAM_CAP))

    f = _field(cfg, "problem.f", dom.dim)
    g = _field(cfg, "problem.g", dom.dim)

    def affine_of(field: Field, name: str):
        if not field.is_poly2 or (field.quad is not None and field.quad.any()):
            raise ConfigError(
                f"{name}: only affine catalog data can be turned into exact nets; "
                "supply a net file instead"
            )
        lin = field.lin if field.lin is not None else np.zeros(dom.dim)
        return nn.affine_net(lin.reshape(1, -1), np.array([field.const]))

    if "assemble.r_net" in cfg:
        r_net = nn.ReluNet.from_json(Path(cfg["assemble.r_net"]).read_text())
        eps_r = float(_need(cfg, "assemble.eps_r"))
    elif dom.kind is DomainKind.HYPERCUBE:
        r_net = nn.hypercube_distance_net(dom.p0, dom.dim)
        eps_r = 0.0
    else:
        raise ConfigError(
            "assemble: an exact distance net is built in for hypercubes only; "
            "supply assemble.r_net (JSON) and assemble.eps_r for other domains"
        )
    g_net = (
        nn.ReluNet.from_json(Path(cfg["assemble.g_net"]).read_text())
        if "assemble.g_net" in cfg
        else affine_of(g, "problem.g")
    )
    f_net = None
    if not f.is_zero:
        f_net = (
            nn.ReluNet.from_json(Path(cfg["assemble.f_net"]).read_text())
            if "assemble.f_net" in cfg
            else affine_of(f, "problem.f")
        )

    f_sup = abs(f.const) if f.is_poly2 and f.is_const else float(cfg.get("assemble.f_sup", 1.0))
    c = float(cfg.get("assemble.c", max(dom.diameter, 2.0 * f_sup)))
    omega = nn.FrozenRandomness(use_seed, m, n, dom.dim)
    unet, audit = nn.assemble_solution_net(
        dom, omega, g_net, f_net, r_net, eps_r, eps_p, c, param_cap=cap
    )

    probe_n = int(cfg.get("assemble.probe", 50))
    pts = uniform_points(use_seed, dom, probe_n)
    wcfg = WosConfig(dom, surrogate_from_exact(dom), f, g, m, n, use_seed)
    ref = estimate(pts, wcfg, threads=threads)
    err = float(np.abs(unet(pts)[:, 0] - ref.values).max())
    budget = m * eps_p * (1.0 + 2.0 * f_sup) / dom.dim if f_net is not None else 1e-9

    if out is not None:
        Path(out).write_text(unet.to_json())
    print(f"size:            {unet.size}")
    print(f"width:           {unet.width}")
    print(f"depth:           {unet.depth}")
    print(f"size_bound:      {audit.bound!r}")
    print(f"probe_points:    {probe_n}")
    print(f"match_error:     {err!r}")
    print(f"match_budget:    {budget!r}")
    print(f"audit:           {'ok' if audit.ok and err <= budget else 'FAILED'}")
    return EXIT_OK if (audit.ok and err <= budget) else EXIT_ASSERTION


# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", required=True, help="flat key-value JSON file")
    p.add_argument("--seed", type=int, default=None, help="override solver.seed")
    p.add_argument("--threads", type=int, default=None, help="worker threads")
    p.add_argument("--out", default=None, help="output CSV/JSON path (default stdout)")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="spherewalk")
    sub = ap.add_subparsers(dest="command", required=True)

    for name in ("solve", "test1", "test2", "assemble-nn"):
        _add_common(sub.add_parser(name))

    pp = sub.add_parser("plan")
    pp.add_argument("--gamma", type=float, required=True)
    pp.add_argument("--eta", type=float, required=True)
    pp.add_argument("--alpha", type=float, default=1.0)
    pp.add_argument("--dim", type=int, required=True)
    pp.add_argument("--diam", type=float, required=True)
    pp.add_argument("--adiam", type=float, default=None)
    pp.add_argument("--delta", type=float, default=None)
    pp.add_argument("--beta", type=float, default=1.0)
    pp.add_argument("--g-inf", type=float, default=0.0)
    pp.add_argument("--g-alpha", type=float, default=0.0)
    pp.add_argument("--f-inf", type=float, default=0.0)
    pp.add_argument("--f-alpha", type=float, default=0.0)
    pp.add_argument("--r-lip", type=float, default=1.0)
    pp.add_argument("--defective", action="store_true")

    args = ap.parse_args(argv)
    if args.command == "plan":
        return run_plan(args)

    runners = {
        "solve": run_solve,
        "test1": run_test1,
        "test2": run_test2,
        "assemble-nn": run_assemble,
    }
    try:
        cfg = _load_config(args.config)
        return runners[args.command](cfg, args.seed, args.threads, args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
