"""Command line entry point: ``eventcons check|run|sweep|optimum``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import runner
from .config import load_scenario
from .engine import ConfigError, SimulationError, prepare
from .generator import recommended_parameters

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _override(scenario, args):
    changes = {}
    if getattr(args, "mode", None):
        changes["mode"] = args.mode
    if getattr(args, "t_final", None) is not None:
        changes["t_final"] = args.t_final
    if getattr(args, "step", None) is not None:
        changes["step"] = args.step
    if getattr(args, "seed", None) is not None:
        changes["init"] = replace(scenario.config.init, seed=args.seed)
    return replace(scenario, config=scenario.config.with_(**changes))


def cmd_check(args):
    scenario = load_scenario(args.config)
    setup = prepare(scenario.config)
    cfg = setup.config
    print(f"scenario: {scenario.name} ({cfg.graph.n} agents, mode {cfg.mode})")
    if setup.spectral is not None:
        sp = setup.spectral
        print(f"graph: strongly_connected={sp.strongly_connected} weight_balanced={sp.weight_balanced}")
        print(f"Sym(L) eigenvalues: {', '.join(f'{e:.6g}' for e in sp.sym_eigs)}")
    print(f"curvature bounds: h_lo={cfg.costs.h_lo_min:.6g} h_hi={cfg.costs.h_hi_max:.6g}")
    for i, c in enumerate(setup.controllers, start=1):
        print(f"agent {i}: K2={c.K2:.4f} U={c.U:.6g} X={c.X.ravel().round(6).tolist()} lambda_P={c.lambda_P:.6g}")
    if setup.alpha_min is not None:
        print(f"recommended: alpha >= {setup.alpha_min:.6g}, beta >= {setup.beta_min:.6g} (eta={cfg.generator.eta:g})")
    print(f"y* = {setup.y_star:.12g}")
    for w in setup.warnings:
        print(f"warning: {w}")
    return EXIT_OK


def cmd_run(args):
    scenario = _override(load_scenario(args.config), args)
    out = args.out or f"runs/{scenario.name}"
    _, setup, summary, checks = runner.run(scenario, out)
    print(f"y* = {setup.y_star:.12g}")
    for key in ("final_error", "tail_radius", "conservation_drift"):
        if key in summary:
            print(f"{key} = {summary[key]:.6g}")
    failed = [c for c in checks if not c[1]]
    for name, ok, value, limit in checks:
        print(f"check {name}: {'pass' if ok else 'FAIL'} ({value:.6g} vs {limit:g})")
    print(f"artifacts written to {out}")
    return EXIT_CHECK if failed else EXIT_OK


def _values(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("at least one value is required")
    return vals


def cmd_sweep(args):
    scenario = _override(load_scenario(args.config), args)
    out = args.out or f"runs/{scenario.name}_sweep"
    try:
        rows = runner.sweep(scenario.config, args.c0, out, jobs=args.jobs)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print("c0,tail_radius,events_ctrl,events_comm")
    for r in rows:
        print(f"{r['c0']},{r['tail_radius']:.6g},{r['events_ctrl']},{r['events_comm']}")
    print(f"sweep written to {out}/sweep.csv")
    return EXIT_OK


def cmd_optimum(args):
    setup = prepare(load_scenario(args.config).config)
    print(f"{setup.y_star:.12g}")
    return EXIT_OK


def cmd_recommend(args):
    alpha, beta = recommended_parameters(args.h_lo, args.h_hi, args.lambda2, args.lambdaN, args.eta)
    print(f"alpha >= {alpha:.6g}\nbeta >= {beta:.6g}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="eventcons", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings raised during setup")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="validate a scenario and print the synthesis report")
    c.add_argument("config")
    c.set_defaults(func=cmd_check)

    def run_opts(sp):
        sp.add_argument("config", help="scenario TOML path or bundled name (paper_sec4)")
        sp.add_argument("--mode", choices=["full", "control_only", "generator_only", "continuous"])
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")
        sp.add_argument("--t-final", dest="t_final", type=float)
        sp.add_argument("--step", type=float)

    r = sub.add_parser("run", help="simulate one scenario and write trace/events/summary")
    run_opts(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="rerun with both c0 thresholds set to each value")
    run_opts(s)
    s.add_argument("--c0", type=_values, required=True, help="comma-separated ascending values")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("optimum", help="print the minimizer of the global cost")
    o.add_argument("config")
    o.set_defaults(func=cmd_optimum)

    rec = sub.add_parser("recommend", help="print the recommended generator gains")
    for name in ("h_lo", "h_hi", "lambda2", "lambdaN", "eta"):
        rec.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, required=True)
    rec.set_defaults(func=cmd_recommend)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
