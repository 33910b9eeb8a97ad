"""Weighted communication digraphs and their Laplacian spectra.

Edges are stored as ``(j, i, a_ij)``: an edge from node ``j`` to node ``i``
means agent ``i`` receives agent ``j``'s information, so ``a_ij`` sits in
row ``i`` of the adjacency matrix.  Node labels are 1-based throughout the
public API and 0-based inside matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BALANCE_TOL = 1e-12
EIG_TOL = 1e-10


class GraphError(ValueError):
    """Raised for malformed graph descriptions."""


@dataclass(frozen=True)
class WeightedDigraph:
    n: int
    edges: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GraphError(f"node count must be a positive integer, got {self.n!r}")
        edges = []
        seen = set()
        for edge in self.edges:
            if len(edge) != 3:
                raise GraphError(f"edge {edge!r} must be [from, to, weight]")
            j, i, w = int(edge[0]), int(edge[1]), float(edge[2])
            if not (1 <= j <= self.n and 1 <= i <= self.n):
                raise GraphError(f"edge {edge!r} references a node outside 1..{self.n}")
            if i == j:
                raise GraphError(f"self-loop at node {i} is not allowed")
            if not w > 0 or not np.isfinite(w):
                raise GraphError(f"edge {edge!r} must carry a strictly positive weight")
            if (j, i) in seen:
                raise GraphError(f"duplicate edge {j}->{i}")
            seen.add((j, i))
            edges.append((j, i, w))
        object.__setattr__(self, "edges", tuple(edges))

    @classmethod
    def from_edges(cls, n, edges):
        return cls(n, tuple(tuple(e) for e in edges))

    @classmethod
    def cycle(cls, n, weight=1.0):
        """Directed ring 1 -> 2 -> ... -> n -> 1."""
        return cls(n, tuple((k, k % n + 1, weight) for k in range(1, n + 1)))

    def adjacency(self):
        A = np.zeros((self.n, self.n))
        for j, i, w in self.edges:
            A[i - 1, j - 1] = w
        return A

    def neighbors(self, i):
        """In-neighbours of node ``i`` (1-based): the agents whose state it reads."""
        return sorted(j for j, k, _ in self.edges if k == i)


@dataclass(frozen=True)
class SpectralReport:
    laplacian: np.ndarray
    sym_eigs: np.ndarray
    lambda2: float
    lambdaN: float
    strongly_connected: bool
    weight_balanced: bool


@dataclass(frozen=True)
class ComplementBasis:
    m1: np.ndarray
    m2: np.ndarray


def laplacian(g):
    """Return ``L = D_in - A`` where row ``i`` holds the weights ``a_ij``."""
    A = g.adjacency()
    return np.diag(A.sum(axis=1)) - A


def _reachable(adj, start):
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(adj[u]):
            if v not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return seen


def is_strongly_connected(g):
    # adjacency()[i, j] > 0 encodes the edge j -> i, so the transpose is the
    # forward successor matrix.
    succ = g.adjacency().T > 0
    if g.n == 1:
        return True
    return len(_reachable(succ, 0)) == g.n and len(_reachable(succ.T, 0)) == g.n


def is_weight_balanced(g, tol=BALANCE_TOL):
    A = g.adjacency()
    return bool(np.all(np.abs(A.sum(axis=1) - A.sum(axis=0)) <= tol))


def check_assumption2(g):
    """Return ``(strongly_connected, weight_balanced)``."""
    return is_strongly_connected(g), is_weight_balanced(g)


def sym_spectrum(L):
    """Sorted eigenvalues of ``(L + L^T)/2`` together with lambda_2 and lambda_N.

    Returns
    -------
    eigs : ndarray
        Eigenvalues in ascending order.
    lambda2 : float
        Second smallest eigenvalue (``nan`` for a single node).
    lambdaN : float
        Largest eigenvalue.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise GraphError(f"Laplacian must be square, got shape {L.shape}")
    try:
        eigs = np.linalg.eigvalsh(0.5 * (L + L.T))
    except np.linalg.LinAlgError as exc:
        raise GraphError(f"eigen-decomposition of Sym(L) failed: {exc}") from exc
    eigs = np.sort(eigs)
    lambda2 = float(eigs[1]) if eigs.size > 1 else float("nan")
    return eigs, lambda2, float(eigs[-1])


def spectral_report(g):
    L = laplacian(g)
    eigs, lambda2, lambdaN = sym_spectrum(L)
    sc, wb = check_assumption2(g)
    return SpectralReport(L, eigs, lambda2, lambdaN, sc, wb)


def complement_basis(n):
    """Orthonormal split of R^n into span(1) and its complement.

    ``m2`` comes from the Householder reflector that maps ``e_1`` onto
    ``1/sqrt(n)``; its remaining columns span the orthogonal complement.
    """
    if int(n) != n or n < 2:
        raise GraphError(f"complement basis needs n >= 2, got {n!r}")
    n = int(n)
    m1 = np.full(n, 1.0 / np.sqrt(n))
    w = m1.copy()
    w[0] -= 1.0
    w /= np.linalg.norm(w)
    H = np.eye(n) - 2.0 * np.outer(w, w)
    return ComplementBasis(m1=m1, m2=H[:, 1:].copy())
