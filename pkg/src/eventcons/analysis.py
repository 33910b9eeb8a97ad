"""Post-run metrics: inter-event statistics, convergence radius, rate fits, W0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generator import equilibrium
from .graph import complement_basis


@dataclass(frozen=True)
class DiagnosticFrame:
    z_hat1: float
    z_hat2: np.ndarray
    v_hat2: np.ndarray
    W0: float


def event_times(events, agent, kind):
    return np.array([t for a, k, t in events if a == agent and k == kind], dtype=float)


def min_inter_event(events, agent, kind, after=0.0):
    """Smallest gap between consecutive events of one agent and kind.

    Only events at times ``>= after`` count.  Returns ``None`` when fewer
    than two events qualify.
    """
    ts = event_times(events, agent, kind)
    ts = ts[ts >= after]
    if ts.size < 2:
        return None
    return float(np.diff(ts).min())


def global_min_inter_event(events, kind, n_agents, after=0.0):
    gaps = [min_inter_event(events, a, kind, after) for a in range(1, n_agents + 1)]
    gaps = [g for g in gaps if g is not None]
    return min(gaps) if gaps else None


def event_counts(events, kind, n_agents):
    counts = [0] * n_agents
    for a, k, _ in events:
        if k == kind:
            counts[a - 1] += 1
    return counts


def window_rates(events, agent, kind, t_final, width=1.0):
    """Events per unit time over consecutive windows ``[k w, (k+1) w)`` covering ``[0, t_final]``."""
    ts = event_times(events, agent, kind)
    n_win = max(1, int(np.floor(t_final / width + 1e-9)))
    edges = np.arange(n_win + 1) * width
    edges[-1] = max(edges[-1], t_final) + 1e-12
    counts, _ = np.histogram(ts, bins=edges)
    return counts / width


def _errors(trace, y_star, signal):
    data = trace.signal(signal)
    if data.shape[1] == 0:
        raise ValueError(f"trace has no {signal!r} series")
    return np.abs(data - y_star).max(axis=1)


def tail_radius(trace, y_star, window, signal="y"):
    """``max_i sup_{t in [T - window, T]} |s_i(t) - y*|``."""
    T = trace.times[-1]
    if not window < T and T > 0:
        raise ValueError(f"window {window} must be shorter than the horizon {T}")
    mask = trace.times >= T - window - 1e-12
    return float(_errors(trace, y_star, signal)[mask].max())


def final_error(trace, y_star, signal="y"):
    return float(_errors(trace, y_star, signal)[-1])


def fit_log_linear(times, values):
    """Least-squares slope of ``log(values)`` against ``times``.

    Nonpositive samples are dropped.  Returns ``(slope, r_squared)``.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > 0
    if keep.sum() < 3:
        raise ValueError("need at least 3 positive samples for a rate fit")
    t, logv = times[keep], np.log(values[keep])
    slope, intercept = np.polyfit(t, logv, 1)
    resid = logv - (slope * t + intercept)
    ss_tot = np.sum((logv - logv.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2)


def fit_exponential_rate(trace, y_star, t_range, signal="y"):
    lo, hi = t_range
    mask = (trace.times >= lo - 1e-12) & (trace.times <= hi + 1e-12)
    return fit_log_linear(trace.times[mask], _errors(trace, y_star, signal)[mask])


def lyapunov_W0(z, v, alpha, basis, z_star, v_star):
    """Coordinates ``(z_hat1, z_hat2, v_hat2)`` and ``W0 = |z_hat|^2/2 + |v_hat2|^2/alpha^3``."""
    dz = np.asarray(z, dtype=float) - z_star
    dw = (np.asarray(v, dtype=float) + alpha * np.asarray(z, dtype=float)) - (v_star + alpha * z_star)
    z1 = float(basis.m1 @ dz)
    z2 = basis.m2.T @ dz
    v2 = basis.m2.T @ dw
    W0 = 0.5 * (z1**2 + z2 @ z2) + (v2 @ v2) / alpha**3
    return DiagnosticFrame(z1, z2, v2, float(W0))


def W0_series(trace, params, L, ensemble, y_star, basis=None):
    """W0 at every sample of ``trace``."""
    n = trace.n_agents
    basis = basis or complement_basis(n)
    z_star, v_star = equilibrium(params, L, ensemble, y_star)
    dz = trace.z - z_star
    dw = (trace.v + params.alpha * trace.z) - (v_star + params.alpha * z_star)
    z_hat = dz @ np.column_stack([basis.m1, basis.m2])
    v_hat2 = dw @ basis.m2
    return 0.5 * np.sum(z_hat**2, axis=1) + np.sum(v_hat2**2, axis=1) / params.alpha**3


def conservation_drift(trace):
    """``max_t |sum_i v_i(t) - sum_i v_i(0)|``."""
    s = trace.v.sum(axis=1)
    return float(np.max(np.abs(s - s[0])))


def zeno_report(events, n_agents, t_final, kind, after=1.0, width=1.0):
    """Per-agent event counts, windowed rates and the post-transient minimum gap."""
    rows = []
    for a in range(1, n_agents + 1):
        rates = window_rates(events, a, kind, t_final, width)
        rows.append(
            {
                "agent": a,
                "count": int(event_times(events, a, kind).size),
                "last_rate": float(rates[-1]),
                "median_rate": float(np.median(rates)),
                "min_gap": min_inter_event(events, a, kind, after),
            }
        )
    return rows


def summarize(trace, setup, window=5.0):
    """Flat dict for the run-summary report."""
    cfg = setup.config
    n = trace.n_agents
    out = {
        "name": cfg.name,
        "mode": cfg.mode,
        "seed": cfg.init.seed,
        "step": cfg.step,
        "t_final": cfg.t_final,
        "alpha": cfg.generator.alpha,
        "beta": cfg.generator.beta,
        "eta": cfg.generator.eta,
        "y_star": setup.y_star,
    }
    for key, rule in (("control", cfg.control), ("comm", cfg.comm)):
        if rule is not None:
            out[f"{key}.c0"], out[f"{key}.c1"], out[f"{key}.gamma"] = rule.c0, rule.c1, rule.gamma
    signal = "y" if trace.has_plants else "z"
    out["signal"] = signal
    if trace.times[-1] > 0:
        w = min(window, trace.times[-1] / 2)
        out["tail_window"] = w
        out["tail_radius"] = tail_radius(trace, setup.y_star, w, signal)
    out["final_error"] = final_error(trace, setup.y_star, signal)
    out["conservation_drift"] = conservation_drift(trace)
    for kind in ("control", "comm"):
        counts = event_counts(trace.events, kind, n)
        for a in range(1, n + 1):
            out[f"events.{kind}.{a}"] = counts[a - 1]
            gap = min_inter_event(trace.events, a, kind)
            out[f"min_interval.{kind}.{a}"] = "none" if gap is None else gap
    for i, w in enumerate(setup.warnings, start=1):
        out[f"warning.{i}"] = w
    return out
