"""CSV and key-value artifacts written for each run."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def _fmt(x):
    return repr(float(x))


def write_trace(trace, path):
    """Columns ``t, y1..yN, z1..zN, v1..vN, u1..uN``.

    Runs without plants (``generator_only``) have no ``y`` or ``u`` columns.
    """
    n = trace.n_agents
    blocks = [("z", trace.z), ("v", trace.v)]
    if trace.has_plants:
        blocks = [("y", trace.y)] + blocks + [("u", trace.u)]
    header = ["t"] + [f"{name}{i}" for name, _ in blocks for i in range(1, n + 1)]
    data = np.column_stack([trace.times] + [arr for _, arr in blocks])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in data:
            w.writerow([_fmt(x) for x in row])


def write_events(events, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["agent", "kind", "time"])
        for agent, kind, t in events:
            w.writerow([agent, kind, _fmt(t)])


def write_summary(summary, path):
    lines = []
    for key, value in summary.items():
        if isinstance(value, float):
            value = _fmt(value)
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_summary(path):
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            out[key] = value
    return out


def write_long(trace, path):
    """Plot-ready long format: ``t, agent, signal, value``."""
    names = ["z", "v"] + (["y", "u"] if trace.has_plants else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "agent", "signal", "value"])
        for name in names:
            arr = trace.signal(name)
            for i in range(trace.n_agents):
                for t, val in zip(trace.times, arr[:, i]):
                    w.writerow([_fmt(t), i + 1, name, _fmt(val)])


SWEEP_COLUMNS = (
    "c0",
    "c_comm0",
    "tail_radius",
    "min_interval_ctrl",
    "min_interval_comm",
    "events_ctrl",
    "events_comm",
)


def write_sweep(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if row[k] is None else row[k]) for k in SWEEP_COLUMNS})
