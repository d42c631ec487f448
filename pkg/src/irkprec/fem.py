"""Model spatial discretizations of the negative Laplacian with (M, K) pairs.

All problems use homogeneous Dirichlet boundaries and the sign convention
``M u' = -K u + b(t)`` with ``K`` symmetric positive definite.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

KINDS = ("laplace1d_p1", "laplace2d_fd", "scalar")


@dataclass(frozen=True)
class ModelProblem:
    kind: str
    n: int
    h: float
    M: np.ndarray
    K: np.ndarray
    nodes: np.ndarray
    forcing: Optional[Callable] = None
    bandwidth: int = 1

    def load(self, t):
        """Load vector ``b(t)`` at the interior nodes."""
        if self.forcing is None:
            return np.zeros(self.n)
        if self.kind == "laplace1d_p1":
            # lumped quadrature h * f(x_i, t)
            return self.h * np.asarray(self.forcing(self.nodes, t), dtype=float) * np.ones(self.n)
        if self.kind == "laplace2d_fd":
            x, y = self.nodes[:, 0], self.nodes[:, 1]
            return np.asarray(self.forcing(x, y, t), dtype=float) * np.ones(self.n)
        return np.atleast_1d(np.asarray(self.forcing(t), dtype=float)) * np.ones(self.n)


def _tridiag(n, diag, off):
    return diag * np.eye(n) + off * (np.eye(n, k=1) + np.eye(n, k=-1))


def assemble_1d(n, forcing=None):
    """Linear finite elements on (0, 1) with ``n`` interior nodes.

    ``forcing(x, t)`` is sampled at the nodes and lumped, ``b_i = h f(x_i, t)``.
    """
    if n < 1:
        raise ValueError("need at least one interior node, got n=%d" % n)
    h = 1.0 / (n + 1)
    K = _tridiag(n, 2.0, -1.0) / h
    M = _tridiag(n, 4.0, 1.0) * (h / 6.0)
    nodes = h * np.arange(1, n + 1)
    return ModelProblem("laplace1d_p1", n, h, M, K, nodes, forcing, bandwidth=1 if n > 1 else 0)


def assemble_2d_fd(nx, forcing=None):
    """Five-point finite differences on the unit square, ``nx`` points per side.

    Unknowns are ordered with x fastest; ``M`` is the identity.
    """
    if nx < 1:
        raise ValueError("need at least one grid point per side, got nx=%d" % nx)
    h = 1.0 / (nx + 1)
    T = _tridiag(nx, 2.0, -1.0)
    I = np.eye(nx)
    K = (np.kron(I, T) + np.kron(T, I)) / h**2
    g = h * np.arange(1, nx + 1)
    X, Y = np.meshgrid(g, g)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    return ModelProblem("laplace2d_fd", nx * nx, h, np.eye(nx * nx), K, nodes, forcing,
                        bandwidth=nx if nx > 1 else 0)


def scalar_problem(m=1.0, k=1.0, forcing=None):
    """The scalar test equation ``m u' = -k u + f(t)``."""
    return ModelProblem("scalar", 1, 1.0, np.array([[float(m)]]), np.array([[float(k)]]),
                        np.zeros(1), forcing, bandwidth=0)


def analytic_mu_1d(n, tau):
    """Closed-form pencil eigenvalues of :func:`assemble_1d`, ascending."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    h = 1.0 / (n + 1)
    ch = np.cos(np.arange(1, n + 1) * np.pi * h)
    return tau * (6.0 / h**2) * (1.0 - ch) / (2.0 + ch)


def analytic_mu_2d(nx, tau):
    """Closed-form pencil eigenvalues of :func:`assemble_2d_fd`, ascending."""
    h = 1.0 / (nx + 1)
    lam = 2.0 * (1.0 - np.cos(np.arange(1, nx + 1) * np.pi * h)) / h**2
    return np.sort(tau * (lam[:, None] + lam[None, :]).ravel())


def make_problem(name, n, forcing=None):
    """Problem factory used by the CLI: ``laplace1d`` (n nodes) or ``laplace2d`` (n per side)."""
    if name in ("laplace1d", "laplace1d_p1"):
        return assemble_1d(n, forcing)
    if name in ("laplace2d", "laplace2d_fd"):
        return assemble_2d_fd(n, forcing)
    if name == "scalar":
        return scalar_problem(forcing=forcing)
    raise ValueError("unknown problem %r" % name)
