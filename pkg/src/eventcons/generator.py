"""Distributed optimal signal generator.

Each agent runs

    z_i' = -alpha grad f_i(z_i) - beta sum_j a_ij (z_i - z_j) - sum_j a_ij (v_i - v_j)
    v_i' = alpha beta sum_j a_ij (z_i - z_j)

either on the true neighbour states (``"continuous"``) or on the values
last broadcast by each agent (``"held"``).  The gradient term always uses
the agent's own true ``z_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODES = ("continuous", "held")


@dataclass(frozen=True)
class GeneratorParams:
    alpha: float
    beta: float
    eta: float = 0.5

    def __post_init__(self):
        for name in ("alpha", "beta", "eta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"generator {name} must be positive, got {v!r}")


@dataclass
class GeneratorState:
    z: np.ndarray
    v: np.ndarray
    z_held: np.ndarray
    v_held: np.ndarray

    @classmethod
    def start(cls, z, v):
        z = np.asarray(z, dtype=float).copy()
        v = np.asarray(v, dtype=float).copy()
        return cls(z, v, z.copy(), v.copy())

    @property
    def z_bar(self):
        return self.z - self.z_held

    @property
    def v_bar(self):
        return self.v - self.v_held


def recommended_parameters(h_lo, h_hi, lambda2, lambdaN, eta):
    """Smallest ``(alpha, beta)`` that guarantee exponential rate ``eta``.

    ``alpha >= max{1, 2 eta / min(h_lo, lambda2), 6 h_hi^2 / (h_lo lambda2)}``
    and ``beta >= max{1, 7 alpha^2 lambdaN^2 / lambda2^2}``.
    """
    for name, v in (("h_lo", h_lo), ("h_hi", h_hi), ("lambda2", lambda2), ("lambdaN", lambdaN), ("eta", eta)):
        if not v > 0:
            raise ValueError(f"{name} must be strictly positive, got {v!r}")
    alpha = max(1.0, 2.0 * eta / min(h_lo, lambda2), 6.0 * h_hi**2 / (h_lo * lambda2))
    beta = max(1.0, 7.0 * alpha**2 * lambdaN**2 / lambda2**2)
    return alpha, beta


def generator_field(z, v, z_diff, v_diff, params, L, grad):
    """Right-hand side of the generator.

    ``z_diff``/``v_diff`` are the values entering the diffusion sums: the
    true ``z, v`` in continuous mode or the held broadcasts in held mode.
    ``grad`` maps the stacked ``z`` to the stacked local gradients.
    """
    Lz = L @ z_diff
    dz = -params.alpha * grad(z) - params.beta * Lz - L @ v_diff
    dv = params.alpha * params.beta * Lz
    return dz, dv


def state_field(state, params, L, ensemble, mode="continuous"):
    """``generator_field`` evaluated on a :class:`GeneratorState`."""
    if mode == "continuous":
        zd, vd = state.z, state.v
    elif mode == "held":
        zd, vd = state.z_held, state.v_held
    else:
        raise ValueError(f"unknown generator mode {mode!r}; expected one of {MODES}")
    return generator_field(state.z, state.v, zd, vd, params, L, ensemble.gradients)


def equilibrium(params, L, ensemble, y_star):
    """Equilibrium ``(z*, v*)`` with ``v*`` the minimal-norm solution of ``L v = -alpha grad(1 y*)``."""
    n = L.shape[0]
    z_star = np.full(n, float(y_star))
    rhs = -params.alpha * ensemble.gradients(z_star)
    v_star = np.linalg.pinv(L) @ rhs
    return z_star, v_star
