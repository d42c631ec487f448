"""Generalized eigendecomposition of the SPD pencil ``tau K - mu M``."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from irkprec.errors import NotPositiveDefiniteError
from irkprec.smalldense import cholesky, eig_spd


@dataclass(frozen=True)
class SpatialPencil:
    M: np.ndarray
    K: np.ndarray
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive, got %r" % self.tau)
        for name in ("M", "K"):
            X = np.asarray(getattr(self, name), dtype=float)
            if X.ndim != 2 or X.shape[0] != X.shape[1]:
                raise ValueError("%s must be square" % name)
            if np.abs(X - X.T).max() > 1e-12 * max(np.abs(X).max(), 1e-300):
                raise ValueError("%s is not symmetric" % name)
        if np.shape(self.M) != np.shape(self.K):
            raise ValueError("M and K have different shapes")

    @property
    def n(self):
        return np.shape(self.M)[0]

    @classmethod
    def from_problem(cls, problem, tau):
        return cls(problem.M, problem.K, float(tau))


@dataclass(frozen=True)
class PencilEigen:
    """Ascending ``mu`` and ``Q`` with ``Q^T M Q = I`` and ``tau K Q = M Q diag(mu)``."""

    mu: np.ndarray
    Q: np.ndarray


def _fix_signs(Q):
    for j in range(Q.shape[1]):
        col = Q[:, j]
        big = np.abs(col).max()
        first = np.flatnonzero(np.abs(col) > 1e-10 * big)
        if first.size and col[first[0]] < 0:
            Q[:, j] = -col
    return Q


def eig_pencil(p):
    """Reduce with ``M = G G^T`` and diagonalize ``G^-1 (tau K) G^-T``."""
    M = np.asarray(p.M, dtype=float)
    K = np.asarray(p.K, dtype=float)
    G = cholesky(M)
    Y = solve_triangular(G, p.tau * K, lower=True)
    C = solve_triangular(G, Y.T, lower=True).T
    w, V = eig_spd(0.5 * (C + C.T))
    if w[0] <= 0:
        raise NotPositiveDefiniteError("stiffness matrix is not positive definite (mu_1 = %.3e)" % w[0])
    Q = solve_triangular(G.T, V, lower=False)
    return PencilEigen(mu=w, Q=_fix_signs(Q))
