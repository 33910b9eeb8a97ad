"""SISO linear agents and the local tracking-controller synthesis.

For each agent ``x' = A x + B u, y = C x`` this module solves the regulator
equations ``A X + B U = 0, C X = 1``, validates or places a stabilizing
gain ``K1``, forms the feedforward ``K2 = U - K1 X`` and solves the
Lyapunov equation ``Ahat^T P + P Ahat = -2 I`` for ``Ahat = A + B K1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-8


class PlantError(ValueError):
    """Raised when an agent model or gain is unusable."""


def _as_matrix(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2:
        raise PlantError(f"{name} must be a matrix, got ndim={M.ndim}")
    return M


@dataclass(frozen=True)
class LinearPlant:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        n = A.shape[0]
        if A.shape != (n, n):
            raise PlantError(f"A must be square, got {A.shape}")
        B = _as_matrix(self.B, "B").reshape(-1, 1) if np.size(self.B) == n else _as_matrix(self.B, "B")
        C = _as_matrix(self.C, "C").reshape(1, -1) if np.size(self.C) == n else _as_matrix(self.C, "C")
        if B.shape != (n, 1):
            raise PlantError(f"B must be {n}x1 for a single-input agent, got {B.shape}")
        if C.shape != (1, n):
            raise PlantError(f"C must be 1x{n} for a single-output agent, got {C.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def dim(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class SynthesizedController:
    K1: np.ndarray
    K2: float
    X: np.ndarray
    U: float
    P: np.ndarray
    lambda_P: float

    def closed_loop(self, plant):
        return plant.A + plant.B @ self.K1


def _rank(M):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def controllability_matrix(A, B):
    cols = [B]
    for _ in range(A.shape[0] - 1):
        cols.append(A @ cols[-1])
    return np.hstack(cols)


def observability_matrix(A, C):
    return controllability_matrix(A.T, C.T).T


def is_minimal(p):
    n = p.dim
    return _rank(controllability_matrix(p.A, p.B)) == n and _rank(observability_matrix(p.A, p.C)) == n


def _regulator_matrix(p):
    return np.block([[p.A, p.B], [p.C, np.zeros((1, 1))]])


def check_transmission_zero_origin(p):
    """True iff ``[[A, B], [C, 0]]`` is nonsingular (no transmission zero at 0)."""
    M = _regulator_matrix(p)
    return _rank(M) == M.shape[0]


def solve_regulator(p):
    """Solve ``A X + B U = 0, C X = 1`` and return ``(X, U)`` with ``X`` as n x 1."""
    if not check_transmission_zero_origin(p):
        raise PlantError("Assumption 3 violated: [[A, B], [C, 0]] is singular (transmission zero at the origin)")
    rhs = np.zeros(p.dim + 1)
    rhs[-1] = 1.0
    sol = np.linalg.solve(_regulator_matrix(p), rhs)
    return sol[:-1].reshape(-1, 1), float(sol[-1])


def is_hurwitz(M):
    return bool(np.max(np.linalg.eigvals(M).real) < 0)


def place_acker(A, B, poles):
    """Ackermann pole placement for ``A + B K``; returns the 1 x n gain ``K``."""
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B").reshape(-1, 1)
    n = A.shape[0]
    poles = np.asarray(poles, dtype=complex)
    if poles.size != n:
        raise PlantError(f"need {n} poles, got {poles.size}")
    coeffs = np.poly(poles)
    if np.max(np.abs(coeffs.imag)) > 1e-9:
        raise PlantError("complex poles must come in conjugate pairs")
    coeffs = coeffs.real
    Wc = controllability_matrix(A, B)
    if _rank(Wc) < n:
        raise PlantError("pole placement failed: (A, B) has an uncontrollable mode")
    phi = np.zeros_like(A)
    for c in coeffs:
        phi = phi @ A + c * np.eye(n)
    last = np.zeros((1, n))
    last[0, -1] = 1.0
    return -last @ np.linalg.solve(Wc, phi)


def synthesize_gain(p, K1=None, poles=None):
    """Return a stabilizing ``K1`` (1 x n).

    A supplied gain is checked for ``A + B K1`` Hurwitz and used verbatim;
    otherwise ``poles`` are placed.
    """
    if K1 is not None:
        K1 = np.asarray(K1, dtype=float).reshape(1, -1)
        if K1.shape[1] != p.dim:
            raise PlantError(f"K1 must have {p.dim} entries, got {K1.shape[1]}")
        if not is_hurwitz(p.A + p.B @ K1):
            eigs = np.linalg.eigvals(p.A + p.B @ K1)
            raise PlantError(f"A + B K1 is not Hurwitz (eigenvalues {np.round(eigs, 6).tolist()})")
        return K1
    if poles is None:
        raise PlantError("either K1 or poles must be given")
    if np.any(np.real(poles) >= 0):
        raise PlantError(f"requested poles {list(poles)} are not all in the open left half-plane")
    return place_acker(p.A, p.B, poles)


def feedforward_gain(K1, X, U):
    """``K2 = U - K1 X``."""
    K1 = np.asarray(K1, dtype=float).reshape(1, -1)
    X = np.asarray(X, dtype=float).reshape(-1, 1)
    return float(U - (K1 @ X)[0, 0])


def solve_lyapunov(A_hat):
    """Solve ``A_hat^T P + P A_hat = -2 I`` through the Kronecker-stacked system.

    Returns ``(P, lambda_P)`` with ``lambda_P`` the largest eigenvalue of P.
    """
    A_hat = _as_matrix(A_hat, "A_hat")
    n = A_hat.shape[0]
    if not is_hurwitz(A_hat):
        raise PlantError("Lyapunov equation needs a Hurwitz matrix")
    eye = np.eye(n)
    # Row-major vec: vec(A^T P) = (A^T kron I) vec(P), vec(P A) = (I kron A^T) vec(P).
    M = np.kron(A_hat.T, eye) + np.kron(eye, A_hat.T)
    if np.linalg.cond(M) > 1e12:
        raise PlantError("stacked Lyapunov system is near-singular")
    P = np.linalg.solve(M, (-2.0 * eye).ravel()).reshape(n, n)
    P = 0.5 * (P + P.T)
    try:
        np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        raise PlantError("Lyapunov solution is not positive definite") from None
    return P, float(np.linalg.eigvalsh(P)[-1])


def synthesize(p, K1=None, poles=None):
    """Full local synthesis for one agent."""
    X, U = solve_regulator(p)
    K1 = synthesize_gain(p, K1=K1, poles=poles)
    P, lam = solve_lyapunov(p.A + p.B @ K1)
    return SynthesizedController(K1=K1, K2=feedforward_gain(K1, X, U), X=X, U=U, P=P, lambda_P=lam)
