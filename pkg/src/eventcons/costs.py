"""Scalar local cost functions and the centralized optimum oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEFAULT_INTERVAL = (-50.0, 50.0)
BRACKET_LIMIT = 1e6


class CostError(ValueError):
    """Raised for unknown cost names, bad parameters, or a failed optimum search."""


@dataclass(frozen=True)
class CostFunction:
    value: Callable[[float], float]
    gradient: Callable[[float], float]
    hessian: Callable[[float], float]
    h_lo: float
    h_hi: float
    label: str
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.h_lo > self.h_hi:
            raise CostError(f"{self.label}: h_lo={self.h_lo} exceeds h_hi={self.h_hi}")

    def __reduce__(self):
        # Builtins are closures; ship them by name so sweeps can fan out to processes.
        if self.label in _BUILTINS:
            return _rebuild_builtin, (self.label, dict(self.params), self.h_lo, self.h_hi)
        return object.__reduce__(self)


def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _quadratic(a=1.0, b=0.0):
    a, b = float(a), float(b)
    if a <= 0:
        raise CostError(f"quadratic curvature must be positive, got a={a}")
    return (
        lambda s: 0.5 * a * (s - b) ** 2,
        lambda s: a * (s - b),
        lambda s: a,
    )


def _f1():
    return _quadratic(1.0, 2.0)


def _f2():
    # s^2 ln(1+s^2) + (s+1)^2
    def value(s):
        return s * s * math.log1p(s * s) + (s + 1.0) ** 2

    def gradient(s):
        q = 1.0 + s * s
        return 2.0 * s * math.log1p(s * s) + 2.0 * s**3 / q + 2.0 * (s + 1.0)

    def hessian(s):
        s2 = s * s
        q = 1.0 + s2
        return 2.0 * math.log1p(s2) + 4.0 * s2 / q + (6.0 * s2 + 2.0 * s2 * s2) / q**2 + 2.0

    return value, gradient, hessian


def _f3():
    # ln(exp(-0.1 s) + exp(0.3 s)) + s^2
    def value(s):
        return float(np.logaddexp(-0.1 * s, 0.3 * s)) + s * s

    def gradient(s):
        return -0.1 + 0.4 * _sigmoid(0.4 * s) + 2.0 * s

    def hessian(s):
        p = _sigmoid(0.4 * s)
        return 0.16 * p * (1.0 - p) + 2.0

    return value, gradient, hessian


def _f4():
    # s^2 / (25 sqrt(s^2+1)) + (s-3)^2
    def value(s):
        return s * s / (25.0 * math.sqrt(s * s + 1.0)) + (s - 3.0) ** 2

    def gradient(s):
        q = s * s + 1.0
        return s * (s * s + 2.0) / (25.0 * q**1.5) + 2.0 * (s - 3.0)

    def hessian(s):
        q = s * s + 1.0
        return (2.0 - s * s) / (25.0 * q**2.5) + 2.0

    return value, gradient, hessian


_BUILTINS = {
    "quadratic": _quadratic,
    "f1": _f1,
    "f2": _f2,
    "f3": _f3,
    "f4": _f4,
}

BUILTIN_NAMES = tuple(_BUILTINS)


def _rebuild_builtin(name, params, h_lo, h_hi):
    value, gradient, hessian = _BUILTINS[name](**params)
    return CostFunction(value, gradient, hessian, h_lo, h_hi, name, params)


def builtin_cost(name, params=None, interval=DEFAULT_INTERVAL, grid=2001):
    """Build a named cost with analytic derivatives.

    Curvature bounds are estimated on ``interval`` (they are exact for
    quadratics).
    """
    params = dict(params or {})
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise CostError(f"unknown cost {name!r}; expected one of {', '.join(BUILTIN_NAMES)}") from None
    try:
        value, gradient, hessian = factory(**params)
    except TypeError as exc:
        raise CostError(f"bad parameters for cost {name!r}: {exc}") from None
    h_lo, h_hi = _grid_bounds(hessian, interval, grid, name)
    return CostFunction(value, gradient, hessian, h_lo, h_hi, name, params)


def _grid_bounds(hessian, interval, grid, label):
    lo, hi = interval
    if not lo < hi:
        raise CostError(f"working interval must satisfy lo < hi, got {interval!r}")
    if grid < 2:
        raise CostError(f"grid must have at least 2 points, got {grid}")
    samples = np.array([hessian(float(s)) for s in np.linspace(lo, hi, int(grid))], dtype=float)
    if not np.all(np.isfinite(samples)):
        raise CostError(f"{label}: non-finite Hessian sample on {interval!r}")
    return float(samples.min()), float(samples.max())


def estimate_curvature_bounds(cost, interval, grid=2001):
    """Min and max of the Hessian over a uniform grid on ``interval``.

    A nonpositive minimum is reported as-is; callers decide whether it
    invalidates strong convexity.
    """
    return _grid_bounds(cost.hessian, interval, grid, cost.label)


@dataclass(frozen=True)
class CostEnsemble:
    costs: tuple[CostFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "costs", tuple(self.costs))
        if not self.costs:
            raise CostError("a cost ensemble needs at least one member")

    def __len__(self):
        return len(self.costs)

    @property
    def h_lo_min(self):
        return min(c.h_lo for c in self.costs)

    @property
    def h_hi_max(self):
        return max(c.h_hi for c in self.costs)

    def value(self, s):
        return sum(c.value(s) for c in self.costs)

    def gradients(self, z):
        """Stacked local gradients ``[grad f_i(z_i)]``."""
        return np.array([c.gradient(float(zi)) for c, zi in zip(self.costs, z)])


def global_gradient(ensemble, s):
    s = float(s)
    return float(sum(c.gradient(s) for c in ensemble.costs))


def global_hessian(ensemble, s):
    s = float(s)
    return float(sum(c.hessian(s) for c in ensemble.costs))


def _bracket(ensemble, start=0.0):
    g0 = global_gradient(ensemble, start)
    if g0 == 0.0:
        return start, start
    step = 1.0
    direction = -1.0 if g0 > 0 else 1.0
    while step <= BRACKET_LIMIT:
        other = start + direction * step
        if np.sign(global_gradient(ensemble, other)) != np.sign(g0):
            return (other, start) if direction < 0 else (start, other)
        step *= 2.0
    raise CostError(f"global gradient keeps its sign within +/-{BRACKET_LIMIT:g}; no minimizer bracketed")


def bisect_optimum(ensemble, tol=1e-10, start=0.0):
    """Minimizer of the global cost by bisection on its derivative.

    Needs no curvature information, which makes it the reference oracle.
    ``tol`` bounds the bracket width.
    """
    lo, hi = _bracket(ensemble, start)
    if lo == hi:
        return lo
    g_lo = global_gradient(ensemble, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        g_mid = global_gradient(ensemble, mid)
        if g_mid == 0.0:
            return mid
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_optimum(ensemble, tol=1e-10, start=0.0, max_iter=200):
    """Safeguarded Newton iteration on the global gradient.

    Iterates stay inside a sign-change bracket; whenever a Newton step
    leaves it (or the curvature is not positive) a bisection step is taken.
    Stops once ``|f'(y)| < tol`` or the bracket collapses.
    """
    lo, hi = _bracket(ensemble, start)
    if lo == hi:
        return lo
    g_lo = global_gradient(ensemble, lo)
    y = 0.5 * (lo + hi)
    for _ in range(max_iter):
        g = global_gradient(ensemble, y)
        if abs(g) < tol:
            return y
        if np.sign(g) == np.sign(g_lo):
            lo, g_lo = y, g
        else:
            hi = y
        h = global_hessian(ensemble, y)
        candidate = y - g / h if h > 0 else np.nan
        y = candidate if lo < candidate < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * np.spacing(max(abs(lo), abs(hi), 1.0)):
            return y
    raise CostError(f"optimum search did not converge in {max_iter} iterations (|f'|={abs(g):.3e})")
