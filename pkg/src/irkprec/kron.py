"""Dense Kronecker assembly of the stage system and brute-force spectral oracles.

Vectors are stage-major throughout: stage ``i`` occupies entries
``i*n .. (i+1)*n - 1``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve, solve_triangular

from irkprec.smalldense import eig_dense

MAX_SIZE = 6000


@dataclass(frozen=True)
class FullSystem:
    """Dense ``A_full = Ainv (x) M + tau I (x) K`` and ``P_full = Atilde (x) M + tau I (x) K``."""

    n: int
    s: int
    tau: float
    A_full: np.ndarray = field(repr=False)
    P_full: np.ndarray = field(repr=False)
    Atilde: np.ndarray = field(repr=False)
    ordering: str = "stage-major"

    @property
    def size(self):
        return self.n * self.s


def _guard(n, s, max_size):
    if n * s > max_size:
        raise ValueError("dense system of size %d exceeds the limit %d" % (n * s, max_size))


def assemble_full(tab, f, p, Atilde=None, max_size=MAX_SIZE):
    """Assemble the dense stage operator and preconditioner (``Atilde`` defaults to ``L``).

    ``tab`` is accepted for provenance and may be ``None``.
    """
    s = f.s
    n = p.n
    _guard(n, s, max_size)
    if tab is not None and tab.s != s:
        raise ValueError("tableau and factorization disagree on the stage count")
    At = np.asarray(f.L if Atilde is None else Atilde, dtype=float)
    if At.shape != (s, s):
        raise ValueError("Atilde must be %dx%d" % (s, s))
    M = np.asarray(p.M, dtype=float)
    tauK = p.tau * np.asarray(p.K, dtype=float)
    stiff = np.kron(np.eye(s), tauK)
    return FullSystem(n, s, float(p.tau), np.kron(f.Ainv, M) + stiff, np.kron(At, M) + stiff, At)


def preconditioned(fs):
    """Dense ``P_full^-1 A_full``."""
    return lu_solve(lu_factor(fs.P_full), fs.A_full)


def oracle_spectrum(fs, vectors=False):
    """Eigenvalues (and 2-normalized eigenvectors) of ``P_full^-1 A_full``."""
    Y = preconditioned(fs)
    if not np.all(np.isfinite(Y)):
        raise np.linalg.LinAlgError("preconditioner is singular")
    if vectors:
        return eig_dense(Y, vectors=True)
    return eig_dense(Y)


@dataclass(frozen=True)
class ShufflePermutation:
    """Perfect shuffle between node-major and stage-major layouts.

    ``sigma[k*s + i] = i*n + k`` (0-based): node-major position ``(k, i)``
    holds stage-major entry ``(i, k)``.
    """

    n: int
    s: int

    @property
    def sigma(self):
        k, i = np.divmod(np.arange(self.n * self.s), self.s)
        return i * self.n + k

    @property
    def inverse(self):
        inv = np.empty(self.n * self.s, dtype=int)
        inv[self.sigma] = np.arange(self.n * self.s)
        return inv

    def matrix(self):
        """``Pi`` with ``Pi[sigma[p], p] = 1``, so ``(Pi^T X Pi)[p, q] = X[sigma[p], sigma[q]]``."""
        N = self.n * self.s
        P = np.zeros((N, N))
        P[self.sigma, np.arange(N)] = 1.0
        return P

    def to_node_major(self, x):
        return np.asarray(x)[..., self.sigma]

    def to_stage_major(self, y):
        return np.asarray(y)[..., self.inverse]

    def conjugate(self, X):
        """``Pi^T X Pi`` without forming ``Pi``."""
        sig = self.sigma
        return np.asarray(X)[np.ix_(sig, sig)]


def shuffle(n, s):
    if n < 1 or s < 1:
        raise ValueError("n and s must be positive")
    return ShufflePermutation(int(n), int(s))


def mode_operator(f, mu):
    """Stage-major matrix whose ``(i, j)`` block is ``diag_k (X_{mu_k})_{ij}``.

    It equals ``(I (x) Q)^-1 P_full^-1 A_full (I (x) Q)``.
    """
    mu = np.asarray(mu, dtype=float)
    n, s = mu.size, f.s
    I = np.eye(n)
    lhs = np.kron(f.L, I) + np.kron(np.eye(s), np.diag(mu))
    rhs = np.kron(f.Ainv, I) + np.kron(np.eye(s), np.diag(mu))
    D = solve_triangular(lhs, rhs, lower=True)
    # blocks are diagonal in exact arithmetic; drop roundoff outside the pattern
    mask = np.kron(np.ones((s, s)), I).astype(bool)
    D[~mask] = 0.0
    return D


def w1w2(tab, f, p, max_size=MAX_SIZE):
    """``W1 = I + tau L^-1 (x) M^-1 K`` and ``W2 = Uhat (x) I``; ``P^-1 A = I + W1^-1 W2``."""
    s, n = f.s, p.n
    _guard(n, s, max_size)
    Linv = solve_triangular(f.L, np.eye(s), lower=True)
    MinvK = np.linalg.solve(np.asarray(p.M, dtype=float), np.asarray(p.K, dtype=float))
    W1 = np.eye(n * s) + p.tau * np.kron(Linv, MinvK)
    W2 = np.kron(f.Uhat, np.eye(n))
    return W1, W2


def pencil_spectrum(W1, W2):
    """Generalized eigenvalues of ``W2 v = lam W1 v`` via ``W1^-1 W2``."""
    return eig_dense(np.linalg.solve(W1, W2))
