"""Run orchestration: single runs with post-run checks, and c0 sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import analysis, io
from .engine import prepare, simulate

log = logging.getLogger(__name__)

TAIL_WINDOW = 5.0


def evaluate_checks(trace, setup, checks, window=TAIL_WINDOW):
    """Return ``[(name, passed, value, limit)]`` for each configured check."""
    y_star = setup.y_star
    signal = "y" if trace.has_plants else "z"
    window = min(window, trace.times[-1] / 2)
    results = []
    for name, limit in checks.items():
        if name == "final_error_max":
            value = analysis.final_error(trace, y_star, signal)
            ok = value < limit
        elif name == "tail_radius_max":
            value = analysis.tail_radius(trace, y_star, window, signal)
            ok = value < limit
        elif name == "conservation_max":
            value = analysis.conservation_drift(trace)
            ok = value < limit
        elif name == "min_interval_min":
            gaps = [
                analysis.global_min_inter_event(trace.events, kind, trace.n_agents, after=1.0)
                for kind in ("control", "comm")
            ]
            gaps = [g for g in gaps if g is not None]
            value = min(gaps) if gaps else float("inf")
            ok = value > limit
        else:
            raise KeyError(name)
        results.append((name, bool(ok), float(value), float(limit)))
    return results


def run(scenario, out_dir=None):
    """Simulate, write artifacts into ``out_dir`` (if given) and evaluate checks.

    Returns ``(trace, setup, summary, check_results)``.
    """
    setup = prepare(scenario.config)
    trace = simulate(scenario.config, setup)
    summary = analysis.summarize(trace, setup, TAIL_WINDOW)
    checks = evaluate_checks(trace, setup, scenario.checks)
    for name, ok, value, limit in checks:
        summary[f"check.{name}"] = f"{'pass' if ok else 'FAIL'} ({value:.6g} vs {limit:g})"
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        io.write_trace(trace, out / "trace.csv")
        io.write_events(trace.events, out / "events.csv")
        io.write_summary(summary, out / "summary.txt")
    return trace, setup, summary, checks


def _sweep_one(args):
    cfg, value, out_dir = args
    control = replace(cfg.control, c0=value) if cfg.control is not None else None
    comm = replace(cfg.comm, c0=value) if cfg.comm is not None else None
    cfg = cfg.with_(control=control, comm=comm)
    setup = prepare(cfg)
    trace = simulate(cfg, setup)
    signal = "y" if trace.has_plants else "z"
    n = trace.n_agents
    window = min(TAIL_WINDOW, trace.times[-1] / 2)
    row = {
        "c0": control.c0 if control is not None else "",
        "c_comm0": comm.c0 if comm is not None else "",
        "tail_radius": analysis.tail_radius(trace, setup.y_star, window, signal),
        "min_interval_ctrl": analysis.global_min_inter_event(trace.events, "control", n),
        "min_interval_comm": analysis.global_min_inter_event(trace.events, "comm", n),
        "events_ctrl": sum(analysis.event_counts(trace.events, "control", n)),
        "events_comm": sum(analysis.event_counts(trace.events, "comm", n)),
    }
    if out_dir is not None:
        sub = Path(out_dir) / f"c0_{value:g}"
        sub.mkdir(parents=True, exist_ok=True)
        io.write_trace(trace, sub / "trace.csv")
        io.write_events(trace.events, sub / "events.csv")
        io.write_summary(analysis.summarize(trace, setup, TAIL_WINDOW), sub / "summary.txt")
    return row


def sweep(cfg, values, out_dir=None, jobs=1):
    """One run per value with both ``c0`` thresholds set to it.

    Rows come back in the order of ``values``; with ``out_dir`` each run
    writes into its own subdirectory and ``sweep.csv`` collects the rows.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    if any(v < 0 for v in values):
        raise ValueError("sweep values must be nonnegative")
    if values != sorted(values):
        raise ValueError("sweep values must be ascending")
    tasks = [(cfg, v, out_dir) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_one, tasks))
    else:
        rows = [_sweep_one(t) for t in tasks]
    if out_dir is not None:
        io.write_sweep(rows, Path(out_dir) / "sweep.csv")
    return rows
