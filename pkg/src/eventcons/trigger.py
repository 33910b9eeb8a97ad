"""Time-decaying triggering thresholds for control updates and broadcasts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

KINDS = ("control", "comm")


@dataclass(frozen=True)
class TriggerRule:
    c0: float
    c1: float
    gamma: float
    kind: str = "control"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"trigger kind must be one of {KINDS}, got {self.kind!r}")
        if self.c0 < 0 or self.c1 < 0:
            raise ValueError(f"{self.kind} rule needs c0, c1 >= 0, got c0={self.c0}, c1={self.c1}")
        if not self.c0 + self.c1 > 0:
            raise ValueError(f"{self.kind} rule needs c0 + c1 > 0")
        if not self.gamma > 0:
            raise ValueError(f"{self.kind} rule needs gamma > 0, got {self.gamma}")


def threshold(rule, t):
    return rule.c0 + rule.c1 * math.exp(-rule.gamma * t)


def control_event(u_bar, rule, t):
    """Fire when the actuation error reaches the threshold.

    The threshold is positive in exact arithmetic, so a zero error never
    fires even after ``c1 exp(-gamma t)`` underflows to 0.0.
    """
    err = abs(u_bar)
    return err > 0 and err >= threshold(rule, t)


def comm_event(z_bar, v_bar, rule, t):
    """Fire when the broadcast error ``||(z_bar, v_bar)||`` reaches the threshold."""
    err = math.hypot(z_bar, v_bar)
    return err > 0 and err >= threshold(rule, t)


@dataclass
class TriggerState:
    n: int
    last_control: list = field(default=None)
    last_comm: list = field(default=None)
    events: list = field(default_factory=list)

    def __post_init__(self):
        if self.last_control is None:
            self.last_control = [None] * self.n
        if self.last_comm is None:
            self.last_comm = [None] * self.n

    def record(self, agent, kind, t):
        """Log an event for 0-based ``agent``; times must increase per (agent, kind)."""
        last = self.last_control if kind == "control" else self.last_comm
        if last[agent] is not None and t <= last[agent]:
            raise ValueError(f"event times must increase: agent {agent + 1} {kind} at {t} after {last[agent]}")
        last[agent] = t
        self.events.append((agent + 1, kind, t))


@dataclass(frozen=True)
class Theorem1Report:
    """Which of the parameter conditions for the combined controller hold."""

    comm_positive: bool
    comm_rate: bool
    c0_dominates: bool
    control_positive: bool
    control_rate: bool
    alpha_ok: bool
    beta_ok: bool
    gamma_bound: float
    comm_gamma_bound: float
    alpha_min: float
    beta_min: float

    def violations(self):
        msgs = []
        if not self.comm_positive:
            msgs.append("comm rule needs c0 + c1 > 0")
        if not self.comm_rate:
            msgs.append(f"comm gamma must lie in (0, {self.comm_gamma_bound:g})")
        if not self.c0_dominates:
            msgs.append("control c0 must be >= comm c0")
        if not self.control_positive:
            msgs.append("control rule needs c0 + c1 > 0")
        if not self.control_rate:
            msgs.append(f"control gamma must lie in (0, {self.gamma_bound:g}) = (0, min{{1, 1/(2 lambda_P), comm gamma}})")
        if not self.alpha_ok:
            msgs.append(f"alpha below recommended minimum {self.alpha_min:g}")
        if not self.beta_ok:
            msgs.append(f"beta below recommended minimum {self.beta_min:g}")
        return msgs

    @property
    def ok(self):
        return not self.violations()


def validate_theorem1(params, control, comm, lambda_P_list, alpha_min, beta_min):
    """Evaluate every parameter condition; never raises."""
    comm_bound = min(1.0, params.eta / 2.0)
    ctrl_bound = min([1.0, comm.gamma] + [1.0 / (2.0 * lp) for lp in lambda_P_list])
    return Theorem1Report(
        comm_positive=comm.c0 + comm.c1 > 0,
        comm_rate=0 < comm.gamma < comm_bound,
        c0_dominates=control.c0 >= comm.c0,
        control_positive=control.c0 + control.c1 > 0,
        control_rate=0 < control.gamma < ctrl_bound,
        alpha_ok=params.alpha >= alpha_min,
        beta_ok=params.beta >= beta_min,
        gamma_bound=ctrl_bound,
        comm_gamma_bound=comm_bound,
        alpha_min=alpha_min,
        beta_min=beta_min,
    )
