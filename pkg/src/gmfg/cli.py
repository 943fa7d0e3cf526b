"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration or model
validation error (reported as a JSON document on stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, equilibrium as eq, simulate, verify
from .config import RunConfig, build_graphon, build_mean, load_config
from .core import solve_riccati
from .errors import GMFGError
from .graphon import check_assumptions, degree_profile

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2


def _clean(obj):
    """Replace non-finite floats by None so the JSON stays standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_clean(data), indent=2) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _setup(cfg: RunConfig):
    params = cfg.game_params()
    g = build_graphon(cfg)
    m = build_mean(cfg, g)
    return params, g, m


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _solve_times(cfg: RunConfig) -> np.ndarray:
    if "times" in cfg.solve:
        return np.asarray(cfg.solve["times"], dtype=float)
    return np.linspace(0.0, float(cfg.solve.get("t_max", 10.0)), int(cfg.solve.get("count", 21)))


def cmd_solve(cfg: RunConfig) -> int:
    params, g, m = _setup(cfg)
    sol = eq.solve(params, g, m)
    out = _out_dir(cfg)

    times = _solve_times(cfg)
    z = eq.eval_z(sol, None, times)
    s = eq.eval_s(sol, None, times)
    q = eq.eval_q(sol, None, times)
    mu = eq.mean_state(sol, None, times)
    alpha = g.grid.tolist()
    rows = (
        (float(t), alpha[i], float(z[j, i]), float(s[j, i]), float(q[j, i]), float(mu[j, i]))
        for j, t in enumerate(times)
        for i in range(g.M)
    )
    write_csv(out / "trajectories.csv", ("t", "alpha", "z", "s", "q", "mean_state"), rows)
    write_csv(out / "cost.csv", eq.COST_COLUMNS, eq.cost_full(sol).rows())
    write_csv(out / "cost_simplified.csv", eq.COST_COLUMNS, eq.cost_simplified(sol).rows())

    report = check_assumptions(g, m, params)
    if report.a3:
        cm = eq.cost_constant_mean(sol)
        write_csv(
            out / "cost_constant_mean.csv",
            ("alpha", "J", "gbar_degree", "gtilde_degree"),
            zip(alpha, cm.J.tolist(), cm.gbar_degree.tolist(), cm.gtilde_degree.tolist()),
        )
    flags = " ".join(f"{k}={'yes' if getattr(report, k) else 'no'}" for k in ("a1", "a2", "a3", "a4", "a5"))
    print(f"pi = {sol.pi:.12g}")
    print("eigenvalues = " + ", ".join(f"{x:.10g}" for x in g.eigenvalues))
    print(f"assumptions: {flags}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    params, g, m = _setup(cfg)
    sol = eq.solve(params, g, m)
    out = _out_dir(cfg)
    fault = cfg.verify.get("fault_lambda_bar_scale")
    lbar = None if fault is None else sol.lambda_bar * float(fault)
    saved = dict(verify.TOLERANCES)
    verify.TOLERANCES.update(cfg.verify.get("tolerances", {}))
    try:
        report = verify.verify_report(sol, q_nodes=int(cfg.verify.get("q_nodes", 8)), lambda_bar_fault=lbar)
    finally:
        verify.TOLERANCES.clear()
        verify.TOLERANCES.update(saved)
    write_json(out / "verify.json", report)
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['value']:.3e} (tol {c['tol']:.1e})")
    if not report["passed"]:
        print(f"verification failed: {', '.join(report['failing'])}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_critical_nodes(cfg: RunConfig) -> int:
    params, g, m = _setup(cfg)
    sol = eq.solve(params, g, m)
    out = _out_dir(cfg)
    report = analysis.equivalence_report(g, sol, ablation=bool(cfg.analysis.get("ablation", True)))
    write_json(out / "critical_nodes.json", report.to_dict())
    print(
        f"verdict: {report.verdict} (mode {report.mode}); "
        f"degree maxima {report.degree_maxima}, cost minima {report.cost_minima}"
    )
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    params, g, m = _setup(cfg)
    sol = eq.solve(params, g, m)
    out = _out_dir(cfg)
    sim = cfg.simulation
    spec = simulate.build_population(
        g,
        int(sim.get("n", 4)),
        sim.get("cluster_size", 100),
        m,
        seed=int(sim.get("seed", 0)),
        nu=float(sim.get("nu", params.nu)),
    )
    result = simulate.run(
        spec,
        params,
        sol,
        dt=float(sim.get("dt", simulate.DEFAULT_DT)),
        T_sim=float(sim["T_sim"]) if "T_sim" in sim else None,
        record_every=int(sim.get("record_every", 100)),
        workers=int(sim.get("workers", 1)),
    )
    metrics = simulate.compare(result, sol)
    az = simulate.analytic_z(result, sol)
    rows = (
        (float(t), l, float(result.empirical_z[j, l]), float(az[j, l]))
        for j, t in enumerate(result.times)
        for l in range(spec.n)
    )
    write_csv(out / "sim_timeseries.csv", ("t", "node", "empirical_z", "analytic_z"), rows)
    write_csv(
        out / "sim_costs.csv",
        ("node", "alpha", "cluster_size", "mean_cost", "cost_se", "analytic_J"),
        zip(range(spec.n), spec.alpha.tolist(), spec.cluster_sizes.tolist(),
            metrics.node_mean_cost, metrics.node_cost_se, metrics.node_analytic_cost),
    )
    write_json(out / "sim_metrics.json", metrics.to_dict())
    print(f"max mean-field error = {metrics.max_z_error:.6g} (band {metrics.z_tolerance:.6g})")
    return EXIT_OK


def cmd_degree(cfg: RunConfig) -> int:
    _, g, _ = _setup(cfg)
    out = _out_dir(cfg)
    write_csv(out / "degree.csv", ("alpha", "degree"), zip(g.grid.tolist(), degree_profile(g).tolist()))
    print(f"wrote {out / 'degree.csv'}")
    return EXIT_OK


def cmd_check_assumptions(cfg: RunConfig) -> int:
    params, g, m = _setup(cfg)
    out = _out_dir(cfg)
    report = check_assumptions(g, m, params).to_dict()
    report["pi"] = solve_riccati(params).pi
    write_json(out / "assumptions.json", report)
    print(json.dumps(_clean({k: v["holds"] for k, v in report.items() if isinstance(v, dict)})))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "critical-nodes": cmd_critical_nodes,
    "simulate": cmd_simulate,
    "degree": cmd_degree,
    "check-assumptions": cmd_check_assumptions,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmfg", description="Infinite-horizon LQG graphon mean field game solver")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="simulation seed (overrides config)")
        p.add_argument("--grid", type=int, help="grid size M (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.output = args.out
        if args.seed is not None:
            cfg.simulation["seed"] = args.seed
        if args.grid is not None:
            cfg.grid = args.grid
            cfg.validate()
        return COMMANDS[args.command](cfg)
    except GMFGError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
