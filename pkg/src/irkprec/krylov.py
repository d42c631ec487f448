"""Matrix-free stage operators, right-preconditioned GMRES, and the IRK integrator."""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from irkprec import kernels
from irkprec.errors import ConvergenceError, NotPositiveDefiniteError
from irkprec.smalldense import bandwidth, to_band
from irkprec.tableau import factorize


def _sparse(A):
    return sp.csr_matrix(np.asarray(A, dtype=float))


class StageSystemOperator:
    """Applies ``(Ainv (x) M + tau I (x) K) v`` stage block by stage block."""

    def __init__(self, M, K, tau, Ainv):
        self.M = _sparse(M)
        self.K = _sparse(K)
        self.tau = float(tau)
        self.Ainv = np.asarray(Ainv, dtype=float)
        self.n = self.M.shape[0]
        self.s = self.Ainv.shape[0]

    @property
    def size(self):
        return self.n * self.s

    def apply(self, v):
        V = np.asarray(v).reshape(self.s, self.n)
        MV = (self.M @ V.T).T
        KV = (self.K @ V.T).T
        return (self.Ainv @ MV + self.tau * KV).ravel()

    __call__ = apply


class PrecondOperator:
    """Applies ``(L (x) M + tau I (x) K)^-1`` by block forward substitution.

    Each diagonal block ``l_ii M + tau K`` is factored once with a banded
    Cholesky whose bandwidth is read off the sparsity pattern.
    """

    def __init__(self, M, K, tau, L):
        M = np.asarray(M, dtype=float)
        K = np.asarray(K, dtype=float)
        self.L = np.asarray(L, dtype=float)
        self.tau = float(tau)
        self.M = _sparse(M)
        self.n = M.shape[0]
        self.s = self.L.shape[0]
        if np.any(np.diag(self.L) <= 0):
            raise NotPositiveDefiniteError("preconditioner needs a positive diagonal in L")
        p = max(bandwidth(M), bandwidth(K))
        self.factors = [kernels.band_cholesky(to_band(self.L[i, i] * M + self.tau * K, p))
                        for i in range(self.s)]

    @property
    def size(self):
        return self.n * self.s

    def apply(self, r):
        R = np.asarray(r, dtype=float).reshape(self.s, self.n)
        Z = np.empty_like(R)
        MZ = np.empty_like(R)
        for i in range(self.s):
            rhs = R[i] - self.L[i, :i] @ MZ[:i] if i else R[i].copy()
            Z[i] = kernels.band_solve(self.factors[i], rhs)
            MZ[i] = self.M @ Z[i]
        return Z.ravel()

    __call__ = apply


def _check_len(op, v):
    if np.shape(v) != (op.size,):
        raise ValueError("expected a vector of length %d, got shape %s" % (op.size, np.shape(v)))


def apply_A(op, v):
    _check_len(op, v)
    return op.apply(v)


def apply_P_inv(pc, r):
    _check_len(pc, r)
    return pc.apply(r)


@dataclass
class GmresResult:
    x: np.ndarray
    iterations: int
    history: List[float]
    converged: bool
    true_residual: float

    @property
    def relative_history(self):
        h = np.asarray(self.history)
        return h / h[0] if h.size and h[0] > 0 else h


def _givens(a, b):
    if b == 0.0:
        return 1.0, 0.0
    r = np.hypot(a, b)
    return a / r, b / r


def gmres(apply_op, b, tol=1e-10, maxit=None, apply_prec=None, x0=None):
    """Right-preconditioned GMRES without restarts.

    Minimizes ``||b - A x||`` over ``x0 + P^-1 K_l(A P^-1, r0)``. ``history[l]``
    is the residual norm after ``l`` iterations (``history[0] = ||r0||``).
    Happy breakdown counts as convergence.
    """
    b = np.asarray(b, dtype=float)
    N = b.size
    maxit = N if maxit is None else int(maxit)
    if maxit < 0 or maxit > N:
        raise ValueError("maxit must lie in [0, %d], got %d" % (N, maxit))
    prec = (lambda v: v) if apply_prec is None else apply_prec
    x0 = np.zeros(N) if x0 is None else np.array(x0, dtype=float)
    r0 = b - apply_op(x0)
    beta = float(np.linalg.norm(r0))
    history = [beta]
    if beta == 0.0:
        return GmresResult(x0, 0, history, True, 0.0)
    V = np.zeros((maxit + 1, N))
    H = np.zeros((maxit + 1, maxit))
    cs = np.zeros(maxit)
    sn = np.zeros(maxit)
    g = np.zeros(maxit + 1)
    g[0] = beta
    V[0] = r0 / beta
    k = 0
    converged = False
    while k < maxit:
        w = apply_op(prec(V[k]))
        wnorm = np.linalg.norm(w)
        # modified Gram-Schmidt with one reorthogonalization pass
        for _ in range(2):
            for j in range(k + 1):
                h = V[j] @ w
                H[j, k] += h
                w = w - h * V[j]
        H[k + 1, k] = np.linalg.norm(w)
        breakdown = H[k + 1, k] <= 1e-14 * max(wnorm, 1e-300)
        if not breakdown:
            V[k + 1] = w / H[k + 1, k]
        for j in range(k):
            t = cs[j] * H[j, k] + sn[j] * H[j + 1, k]
            H[j + 1, k] = -sn[j] * H[j, k] + cs[j] * H[j + 1, k]
            H[j, k] = t
        cs[k], sn[k] = _givens(H[k, k], H[k + 1, k])
        H[k, k] = cs[k] * H[k, k] + sn[k] * H[k + 1, k]
        H[k + 1, k] = 0.0
        g[k + 1] = -sn[k] * g[k]
        g[k] = cs[k] * g[k]
        k += 1
        history.append(abs(g[k]))
        if breakdown or abs(g[k]) <= tol * beta:
            converged = True
            break
    y = np.zeros(k)
    for i in range(k - 1, -1, -1):
        y[i] = (g[i] - H[i, i + 1:k] @ y[i + 1:]) / H[i, i]
    x = x0 + prec(V[:k].T @ y) if k else x0
    true_res = float(np.linalg.norm(b - apply_op(x)))
    return GmresResult(x, k, history, converged, true_res)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    maxit: Optional[int] = None
    precond: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")


class IrkStepper:
    """Reusable operators for stepping ``M u' = -K u + b(t)`` with a fixed ``tau``."""

    def __init__(self, tab, problem, tau, config=SolverConfig(), factorization=None):
        if not tau > 0:
            raise ValueError("tau must be positive")
        self.tab = tab
        self.problem = problem
        self.tau = float(tau)
        self.config = config
        self.f = factorize(tab) if factorization is None else factorization
        self.op = StageSystemOperator(problem.M, problem.K, tau, self.f.Ainv)
        self.pc = PrecondOperator(problem.M, problem.K, tau, self.f.L) if config.precond else None
        self.K = self.op.K
        self.rowsum = self.f.Ainv @ np.ones(tab.s)

    def rhs(self, u_prev, t_prev):
        loads = np.array([self.problem.load(t_prev + ci * self.tau) for ci in self.tab.c])
        Ku = self.K @ u_prev
        return (np.outer(self.rowsum, -Ku) + self.f.Ainv @ loads).ravel()

    def step(self, u_prev, t_prev):
        u_prev = np.asarray(u_prev, dtype=float)
        res = gmres(self.op.apply, self.rhs(u_prev, t_prev), tol=self.config.tol,
                    maxit=self.config.maxit,
                    apply_prec=None if self.pc is None else self.pc.apply)
        if not res.converged:
            raise ConvergenceError("stage solve did not converge in %d iterations" % res.iterations)
        k = res.x.reshape(self.tab.s, -1)
        return u_prev + self.tau * (self.tab.b @ k), res


def irk_step(u_prev, t_prev, tau, tab, problem, config=SolverConfig()):
    """One implicit Runge-Kutta step; returns ``(u_next, GmresResult)``."""
    return IrkStepper(tab, problem, tau, config).step(u_prev, t_prev)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    iterations: List[int] = field(default_factory=list)


def irk_integrate(u0, T, steps, tab, problem, config=SolverConfig(), t0=0.0):
    """Integrate over ``[t0, t0 + T]`` with ``steps`` equal steps."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    u = np.array(u0, dtype=float)
    states = [u.copy()]
    iters = []
    if steps:
        tau = T / steps
        stepper = IrkStepper(tab, problem, tau, config)
        for m in range(steps):
            u, res = stepper.step(u, t0 + m * tau)
            states.append(u.copy())
            iters.append(res.iterations)
    times = t0 + np.linspace(0.0, T, steps + 1) if steps else np.array([t0])
    return Trajectory(times, np.array(states), iters)
