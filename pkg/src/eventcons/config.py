"""TOML scenario files: loading, validation and emission.

Layout::

    name, mode, t_final, step, working_interval
    [graph]            n, edges = [[from, to, weight], ...]
    [[agents]]         A, B, C (row-major), optional K1 or poles
    [[costs]]          name plus the cost's own parameters (e.g. a, b)
    [generator]        alpha, beta, eta, enforce_bounds
    [trigger.control]  c0, c1, gamma
    [trigger.comm]     c0, c1, gamma
    [init]             seed, range, optional x / z / v
    [checks]           optional post-run assertions (see CHECK_KEYS)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from .costs import DEFAULT_INTERVAL, CostEnsemble, CostError, builtin_cost
from .engine import AgentSpec, ConfigError, InitialConditions, SimConfig
from .generator import GeneratorParams
from .graph import GraphError, WeightedDigraph
from .plant import LinearPlant, PlantError
from .trigger import TriggerRule

BUNDLED = ("paper_sec4", "reference_agent3_singular")
CHECK_KEYS = ("final_error_max", "tail_radius_max", "conservation_max", "min_interval_min")


@dataclass(frozen=True)
class Scenario:
    name: str
    config: SimConfig
    checks: dict = field(default_factory=dict)


def bundled_path(name):
    return resources.files("eventcons") / "scenarios" / f"{name}.toml"


def resolve(ref):
    """Map a bundled scenario name or a filesystem path to readable text."""
    if ref in BUNDLED:
        return bundled_path(ref).read_text(encoding="utf-8"), ref
    path = Path(ref)
    if not path.exists():
        raise ConfigError(f"no such scenario file or bundled scenario: {ref}")
    return path.read_text(encoding="utf-8"), str(path)


def load_scenario(ref):
    text, origin = resolve(ref)
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{origin}: parse error: {exc}") from None
    return scenario_from_dict(raw, origin)


def load_config(ref):
    return load_scenario(ref).config


def _matrix(value, what, errors):
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        errors.append(f"{what} is not a numeric matrix")
        return None
    return np.atleast_2d(M)


def _rule(raw, kind, errors):
    if raw is None:
        return None
    missing = [k for k in ("c0", "c1", "gamma") if k not in raw]
    if missing:
        errors.append(f"trigger.{kind} is missing {', '.join(missing)}")
        return None
    try:
        return TriggerRule(float(raw["c0"]), float(raw["c1"]), float(raw["gamma"]), kind)
    except ValueError as exc:
        errors.append(f"trigger.{kind}: {exc}")
        return None


def scenario_from_dict(raw, origin="<dict>"):
    """Build a :class:`Scenario`, collecting every error before raising."""
    errors = []
    name = str(raw.get("name", Path(origin).stem))

    g_raw = raw.get("graph")
    graph = None
    if g_raw is None or "n" not in g_raw:
        errors.append("graph.n is required")
    else:
        try:
            graph = WeightedDigraph.from_edges(int(g_raw["n"]), g_raw.get("edges", []))
        except (GraphError, TypeError, ValueError) as exc:
            errors.append(f"graph: {exc}")

    interval = tuple(float(x) for x in raw.get("working_interval", DEFAULT_INTERVAL))
    costs = []
    for idx, c in enumerate(raw.get("costs", []), start=1):
        params = {k: v for k, v in c.items() if k != "name"}
        try:
            costs.append(builtin_cost(c.get("name"), params, interval=interval))
        except CostError as exc:
            errors.append(f"cost {idx}: {exc}")
    if not raw.get("costs"):
        errors.append("at least one [[costs]] entry is required")

    agents = []
    for idx, a in enumerate(raw.get("agents", []), start=1):
        missing = [k for k in ("A", "B", "C") if k not in a]
        if missing:
            errors.append(f"agent {idx}: missing {', '.join(missing)} matrix")
            continue
        mats = [_matrix(a[k], f"agent {idx} {k}", errors) for k in ("A", "B", "C")]
        if any(m is None for m in mats):
            continue
        try:
            plant = LinearPlant(*mats)
        except PlantError as exc:
            errors.append(f"agent {idx}: {exc}")
            continue
        K1 = np.array(a["K1"], dtype=float).reshape(1, -1) if "K1" in a else None
        poles = tuple(a["poles"]) if "poles" in a else None
        if K1 is None and poles is None:
            errors.append(f"agent {idx}: give either K1 or poles")
            continue
        agents.append(AgentSpec(plant, K1, poles))

    gen = raw.get("generator", {})
    params = None
    try:
        params = GeneratorParams(float(gen.get("alpha", 1.0)), float(gen.get("beta", 1.0)), float(gen.get("eta", 0.5)))
    except ValueError as exc:
        errors.append(str(exc))

    trig = raw.get("trigger", {})
    control = _rule(trig.get("control"), "control", errors)
    comm = _rule(trig.get("comm"), "comm", errors)

    init_raw = raw.get("init", {})
    low, high = init_raw.get("range", (-5.0, 5.0))
    init = InitialConditions(
        seed=int(init_raw.get("seed", 0)),
        low=float(low),
        high=float(high),
        x=tuple(tuple(float(e) for e in xi) for xi in init_raw["x"]) if "x" in init_raw else None,
        z=tuple(float(e) for e in init_raw["z"]) if "z" in init_raw else None,
        v=tuple(float(e) for e in init_raw["v"]) if "v" in init_raw else None,
    )

    checks = dict(raw.get("checks", {}))
    unknown = sorted(set(checks) - set(CHECK_KEYS))
    if unknown:
        errors.append(f"unknown checks: {', '.join(unknown)}")

    if errors:
        raise ConfigError([f"{origin}: {e}" for e in errors])
    cfg = SimConfig(
        graph=graph,
        costs=CostEnsemble(costs),
        generator=params,
        agents=tuple(agents),
        control=control,
        comm=comm,
        mode=str(raw.get("mode", "full")),
        t_final=float(raw.get("t_final", 20.0)),
        step=float(raw.get("step", 1e-3)),
        init=init,
        enforce_bounds=bool(gen.get("enforce_bounds", False)),
        name=name,
        working_interval=interval,
    )
    return Scenario(name, cfg, checks)


def _floats(M):
    return np.asarray(M, dtype=float).tolist()


def config_to_dict(cfg, checks=None):
    out = {
        "name": cfg.name,
        "mode": cfg.mode,
        "t_final": float(cfg.t_final),
        "step": float(cfg.step),
        "working_interval": [float(x) for x in cfg.working_interval],
        "graph": {"n": cfg.graph.n, "edges": [[j, i, w] for j, i, w in cfg.graph.edges]},
        "costs": [{"name": c.label, **c.params} for c in cfg.costs.costs],
        "generator": {
            "alpha": cfg.generator.alpha,
            "beta": cfg.generator.beta,
            "eta": cfg.generator.eta,
            "enforce_bounds": cfg.enforce_bounds,
        },
    }
    agents = []
    for a in cfg.agents:
        entry = {"A": _floats(a.plant.A), "B": _floats(a.plant.B), "C": _floats(a.plant.C)}
        if a.K1 is not None:
            entry["K1"] = _floats(np.ravel(a.K1))
        if a.poles is not None:
            entry["poles"] = list(a.poles)
        agents.append(entry)
    if agents:
        out["agents"] = agents
    trig = {}
    for kind, rule in (("control", cfg.control), ("comm", cfg.comm)):
        if rule is not None:
            trig[kind] = {"c0": rule.c0, "c1": rule.c1, "gamma": rule.gamma}
    if trig:
        out["trigger"] = trig
    init = {"seed": cfg.init.seed, "range": [cfg.init.low, cfg.init.high]}
    if cfg.init.x is not None:
        init["x"] = [list(xi) for xi in cfg.init.x]
    for key in ("z", "v"):
        if getattr(cfg.init, key) is not None:
            init[key] = list(getattr(cfg.init, key))
    out["init"] = init
    if checks:
        out["checks"] = dict(checks)
    return out


def dump_config(cfg, checks=None):
    """Serialize to TOML text that :func:`load_scenario` reads back unchanged."""
    return tomli_w.dumps(config_to_dict(cfg, checks))
