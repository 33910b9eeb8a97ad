"""Multi-rate closed-loop simulation with zero-order holds.

Agents, generator and held values are advanced with fixed-step RK4; held
inputs and broadcasts stay frozen inside a step.  Triggering rules are
sampled at every step boundary: communication events first, then control
events, agents in index order.

Run modes
---------
``full``
    event-triggered control and event-triggered communication.
``control_only``
    event-triggered control, generator on continuously shared states.
``generator_only``
    event-triggered generator alone, no plants.
``continuous``
    continuous generator, control recomputed every step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .costs import DEFAULT_INTERVAL, CostEnsemble, bisect_optimum
from .generator import GeneratorParams, generator_field, recommended_parameters
from .graph import WeightedDigraph, laplacian, spectral_report
from .plant import LinearPlant, PlantError, is_minimal, synthesize
from .trigger import TriggerRule, TriggerState, threshold, validate_theorem1

log = logging.getLogger(__name__)

MODES = ("full", "control_only", "generator_only", "continuous")
ORACLE_TOL = 1e-10


class ConfigError(ValueError):
    """Invalid or inconsistent simulation configuration.

    ``errors`` lists every problem found, not just the first.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SimulationError(RuntimeError):
    """The integration produced a non-finite state."""


@dataclass(frozen=True)
class AgentSpec:
    plant: LinearPlant
    K1: np.ndarray | None = None
    poles: tuple | None = None


@dataclass(frozen=True)
class InitialConditions:
    """Initial states; anything left as ``None`` is drawn uniformly from ``[low, high]``."""

    seed: int = 0
    low: float = -5.0
    high: float = 5.0
    x: tuple | None = None
    z: tuple | None = None
    v: tuple | None = None

    def resolve(self, dims, n):
        """Return ``(x_list, z, v)``; draws happen in the fixed order x, z, v."""
        rng = np.random.default_rng(self.seed)
        x_draw = [rng.uniform(self.low, self.high, size=d) for d in dims]
        z_draw = rng.uniform(self.low, self.high, size=n)
        v_draw = rng.uniform(self.low, self.high, size=n)
        x = x_draw if self.x is None else [np.asarray(xi, dtype=float).ravel() for xi in self.x]
        z = z_draw if self.z is None else np.asarray(self.z, dtype=float).ravel()
        v = v_draw if self.v is None else np.asarray(self.v, dtype=float).ravel()
        return x, z, v


@dataclass(frozen=True)
class SimConfig:
    graph: WeightedDigraph
    costs: CostEnsemble
    generator: GeneratorParams
    agents: tuple = ()
    control: TriggerRule | None = None
    comm: TriggerRule | None = None
    mode: str = "full"
    t_final: float = 20.0
    step: float = 1e-3
    init: InitialConditions = field(default_factory=InitialConditions)
    enforce_bounds: bool = False
    name: str = "scenario"
    working_interval: tuple = DEFAULT_INTERVAL

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass
class Setup:
    """Everything derived from a config before integration starts."""

    config: SimConfig
    controllers: list
    spectral: object
    y_star: float
    alpha_min: float | None
    beta_min: float | None
    theorem1: object
    warnings: list

    @property
    def has_plants(self):
        return bool(self.controllers) and self.config.mode != "generator_only"


@dataclass
class Trace:
    times: np.ndarray
    y: np.ndarray
    z: np.ndarray
    v: np.ndarray
    u: np.ndarray
    u_tilde: np.ndarray
    z_held: np.ndarray
    v_held: np.ndarray
    x: list
    events: list
    y_star: float
    mode: str
    seed: int
    step: float
    regulator_X: list = field(default_factory=list)

    @property
    def n_agents(self):
        return self.z.shape[1]

    @property
    def has_plants(self):
        return bool(self.x)

    def x_bar(self, i):
        """Tracking error ``x_i - X_i z_i`` for 0-based agent ``i``."""
        return self.x[i] - np.outer(self.z[:, i], self.regulator_X[i].ravel())

    def signal(self, name):
        return {"y": self.y, "z": self.z, "v": self.v, "u": self.u}[name]


def _needs_plants(mode):
    return mode in ("full", "control_only")


def prepare(cfg):
    """Validate ``cfg`` and run every synthesis step.

    Raises :class:`ConfigError` listing all fatal problems; soft problems
    (parameter recommendations, Theorem 1 conditions, Assumption 2) are
    returned as warnings.
    """
    errors, warnings = [], []
    n = cfg.graph.n
    if cfg.mode not in MODES:
        errors.append(f"unknown mode {cfg.mode!r}; expected one of {', '.join(MODES)}")
    if not cfg.step > 0:
        errors.append(f"step must be positive, got {cfg.step}")
    if not cfg.t_final >= 0:
        errors.append(f"t_final must be nonnegative, got {cfg.t_final}")
    elif cfg.step > 0:
        k = cfg.t_final / cfg.step
        if abs(k - round(k)) > 1e-6:
            errors.append(f"t_final={cfg.t_final} is not a whole number of steps of {cfg.step}")
    if len(cfg.costs) != n:
        errors.append(f"graph has {n} nodes but {len(cfg.costs)} costs are given")
    if cfg.agents and len(cfg.agents) != n:
        errors.append(f"graph has {n} nodes but {len(cfg.agents)} agents are given")
    if _needs_plants(cfg.mode) and not cfg.agents:
        errors.append(f"mode {cfg.mode!r} needs agent models")
    if cfg.mode in ("full", "control_only") and cfg.control is None:
        errors.append(f"mode {cfg.mode!r} needs a control trigger rule")
    if cfg.mode in ("full", "generator_only") and cfg.comm is None:
        errors.append(f"mode {cfg.mode!r} needs a communication trigger rule")

    controllers = []
    if cfg.mode != "generator_only":
        for idx, agent in enumerate(cfg.agents, start=1):
            if not is_minimal(agent.plant):
                warnings.append(f"agent {idx}: (C, A, B) is not minimal")
            try:
                controllers.append(synthesize(agent.plant, K1=agent.K1, poles=agent.poles))
            except PlantError as exc:
                errors.append(f"agent {idx}: {exc}")

    sc, wb = False, False
    spec = None
    try:
        spec = spectral_report(cfg.graph)
        sc, wb = spec.strongly_connected, spec.weight_balanced
    except ValueError as exc:
        errors.append(str(exc))
    if not sc:
        warnings.append("Assumption 2: graph is not strongly connected")
    if not wb:
        warnings.append("Assumption 2: graph is not weight-balanced")

    y_star = float("nan")
    if len(cfg.costs) == n:
        try:
            y_star = bisect_optimum(cfg.costs, tol=ORACLE_TOL)
        except ValueError as exc:
            errors.append(f"optimum oracle: {exc}")
    if cfg.costs.h_lo_min <= 0:
        warnings.append(f"Assumption 1: estimated curvature lower bound {cfg.costs.h_lo_min:g} is not positive")

    alpha_min = beta_min = None
    if spec is not None and n >= 2 and spec.lambda2 > 1e-10 and cfg.costs.h_lo_min > 0:
        alpha_min, beta_min = recommended_parameters(
            cfg.costs.h_lo_min, cfg.costs.h_hi_max, spec.lambda2, spec.lambdaN, cfg.generator.eta
        )
        msgs = []
        if cfg.generator.alpha < alpha_min:
            msgs.append(f"alpha={cfg.generator.alpha:g} below recommended {alpha_min:g}")
        if cfg.generator.beta < beta_min:
            msgs.append(f"beta={cfg.generator.beta:g} below recommended {beta_min:g}")
        if msgs and cfg.enforce_bounds:
            errors.extend(msgs)
        else:
            warnings.extend(msgs)

    report = None
    if cfg.control is not None and cfg.comm is not None and alpha_min is not None:
        report = validate_theorem1(
            cfg.generator, cfg.control, cfg.comm, [c.lambda_P for c in controllers], alpha_min, beta_min
        )
        warnings.extend(f"Theorem 1: {m}" for m in report.violations() if "alpha" not in m and "beta" not in m)

    if errors:
        raise ConfigError(errors)
    for w in warnings:
        log.warning("%s: %s", cfg.name, w)
    return Setup(cfg, controllers, spec, y_star, alpha_min, beta_min, report, warnings)


def rk4_step(f, y, h):
    """One classical Runge-Kutta step of ``y' = f(y)`` (autonomous within the step)."""
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(cfg, setup=None):
    """Integrate ``cfg`` on ``[0, t_final]`` and return the full :class:`Trace`."""
    if setup is None:
        setup = prepare(cfg)
    mode = cfg.mode
    n = cfg.graph.n
    h = float(cfg.step)
    n_steps = int(round(cfg.t_final / h))
    L = laplacian(cfg.graph)
    params = cfg.generator
    grad = cfg.costs.gradients

    plants = [a.plant for a in cfg.agents] if setup.has_plants else []
    ctrls = setup.controllers if setup.has_plants else []
    dims = [p.dim for p in plants]
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    nx = int(offsets[-1])

    x_list, z, v = cfg.init.resolve(dims, n)
    if len(z) != n or len(v) != n:
        raise ConfigError(f"initial z and v must have {n} entries")
    for i, (xi, d) in enumerate(zip(x_list, dims)):
        if xi.size != d:
            raise ConfigError(f"agent {i + 1}: initial state has {xi.size} entries, expected {d}")

    if plants:
        A_blk = scipy.linalg.block_diag(*[p.A for p in plants])
        B_blk = scipy.linalg.block_diag(*[p.B for p in plants])
        C_blk = scipy.linalg.block_diag(*[p.C for p in plants])
        K1_blk = scipy.linalg.block_diag(*[c.K1 for c in ctrls])
        K2 = np.array([c.K2 for c in ctrls])
        x = np.concatenate(x_list)
    else:
        A_blk = B_blk = C_blk = K1_blk = None
        K2 = np.zeros(n)
        x = np.zeros(0)

    event_comm = mode in ("full", "generator_only")
    event_ctrl = mode in ("full", "control_only")

    def u_tilde(x, z):
        return K1_blk @ x + K2 * z if plants else np.zeros(n)

    z_held, v_held = z.copy(), v.copy()
    u = u_tilde(x, z)
    state = TriggerState(n)
    for i in range(n):
        if event_comm:
            state.record(i, "comm", 0.0)
        if event_ctrl:
            state.record(i, "control", 0.0)

    T = n_steps + 1
    rec = {key: np.empty((T, n)) for key in ("y", "z", "v", "u", "ut", "zh", "vh")}
    rec_x = np.empty((T, nx))

    def record(k, x, z, v, u, zh, vh):
        rec["z"][k], rec["v"][k], rec["zh"][k], rec["vh"][k] = z, v, zh, vh
        if plants:
            rec_x[k] = x
            rec["y"][k] = C_blk @ x
            rec["u"][k] = u
            rec["ut"][k] = u_tilde(x, z)

    record(0, x, z, v, u, z_held, v_held)

    held_diffusion = event_comm
    sx = slice(0, nx)
    sz = slice(nx, nx + n)
    sv = slice(nx + n, nx + 2 * n)

    for k in range(n_steps):
        t_next = (k + 1) * h
        u_applied = u if event_ctrl else u_tilde(x, z)

        if held_diffusion:
            # Broadcast values are frozen over the step; only the local gradient moves.
            Lz_h = L @ z_held
            drift_z = -params.beta * Lz_h - L @ v_held
            dv_const = params.alpha * params.beta * Lz_h

            def f(y):
                out = np.empty_like(y)
                if plants:
                    out[sx] = A_blk @ y[sx] + B_blk @ u_applied
                out[sz] = -params.alpha * grad(y[sz]) + drift_z
                out[sv] = dv_const
                return out
        else:

            def f(y):
                out = np.empty_like(y)
                if plants:
                    out[sx] = A_blk @ y[sx] + B_blk @ u_applied
                zz, vv = y[sz], y[sv]
                out[sz], out[sv] = generator_field(zz, vv, zz, vv, params, L, grad)
                return out

        try:
            with np.errstate(over="ignore", invalid="ignore"):
                y = rk4_step(f, np.concatenate([x, z, v]), h)
        except OverflowError:
            y = np.array([np.inf])
        if not np.all(np.isfinite(y)):
            raise SimulationError(f"non-finite state at t={t_next:g} (step {k + 1}); try a smaller step")
        x, z, v = y[sx], y[sz].copy(), y[sv].copy()

        if event_comm:
            thr = threshold(cfg.comm, t_next)
            err = np.hypot(z - z_held, v - v_held)
            for i in np.flatnonzero((err > 0) & (err >= thr)):
                z_held[i], v_held[i] = z[i], v[i]
                state.record(int(i), "comm", t_next)
        else:
            z_held, v_held = z.copy(), v.copy()

        if event_ctrl:
            ut = u_tilde(x, z)
            thr = threshold(cfg.control, t_next)
            err = np.abs(u - ut)
            for i in np.flatnonzero((err > 0) & (err >= thr)):
                u[i] = ut[i]
                state.record(int(i), "control", t_next)
        elif plants:
            u = u_tilde(x, z)

        record(k + 1, x, z, v, u, z_held, v_held)

    times = np.arange(T) * h
    empty = np.empty((T, 0))
    return Trace(
        times=times,
        y=rec["y"] if plants else empty,
        z=rec["z"],
        v=rec["v"],
        u=rec["u"] if plants else empty,
        u_tilde=rec["ut"] if plants else empty,
        z_held=rec["zh"],
        v_held=rec["vh"],
        x=[rec_x[:, offsets[i] : offsets[i + 1]].copy() for i in range(len(plants))],
        events=state.events,
        y_star=setup.y_star,
        mode=mode,
        seed=cfg.init.seed,
        step=h,
        regulator_X=[c.X for c in ctrls],
    )
