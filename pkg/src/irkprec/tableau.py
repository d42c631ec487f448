"""RadauIIA Butcher tableaux and the LDU split of the inverse Butcher matrix.

Construction and factorization run in ``numpy.longdouble`` and round to
double at the end, so small tableaux come out correctly rounded (e.g. the
s=2 coupling entry is exactly ``fl(1/3)``).
"""
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from irkprec.errors import ConvergenceError, ZeroPivotError
from irkprec.smalldense import polyroots_companion, spectral_norm

MAX_STAGES = 10


@dataclass(frozen=True)
class ButcherTable:
    """Coefficients ``(A, b, c)`` of an ``s``-stage Runge-Kutta method."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    family: str = "custom"
    # extended-precision copy of A kept from construction, if available
    A_ext: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def s(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class IrkFactorization:
    """``Ainv = L (I + Uhat)`` with ``L`` lower and ``Uhat`` strictly upper triangular."""

    Ainv: np.ndarray
    L: np.ndarray
    Uhat: np.ndarray
    uhat_norm2: float
    uhat_normF: float = field(default=0.0)
    l_norm2: float = field(default=0.0)
    l_normF: float = field(default=0.0)

    @property
    def s(self):
        return self.L.shape[0]


XP = np.longdouble


def _solve_ext(A, B):
    """Gaussian elimination with partial pivoting in extended precision."""
    A = np.array(A, dtype=XP)
    B = np.array(B, dtype=XP)
    vec = B.ndim == 1
    if vec:
        B = B[:, None]
    n = A.shape[0]
    for k in range(n):
        piv = k + int(np.argmax(np.abs(A[k:, k])))
        if A[piv, k] == 0:
            raise np.linalg.LinAlgError("singular matrix")
        if piv != k:
            A[[k, piv]] = A[[piv, k]]
            B[[k, piv]] = B[[piv, k]]
        f = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(f, A[k, k:])
        B[k + 1:] -= np.outer(f, B[k])
    X = np.zeros_like(B)
    for k in range(n - 1, -1, -1):
        X[k] = (B[k] - A[k, k + 1:] @ X[k + 1:]) / A[k, k]
    return X[:, 0] if vec else X


def _shifted_legendre_pair(s, x):
    """Values and x-derivatives of P_s(2x-1) - P_{s-1}(2x-1) by recurrence."""
    y = 2.0 * x - 1.0
    p_prev, p_cur = np.ones_like(y), y
    d_prev, d_cur = np.zeros_like(y), np.full_like(y, 2.0)
    for k in range(1, s):
        p_next = ((2 * k + 1) * y * p_cur - k * p_prev) / (k + 1)
        d_next = ((2 * k + 1) * (2.0 * p_cur + y * d_cur) - k * d_prev) / (k + 1)
        p_prev, p_cur, d_prev, d_cur = p_cur, p_next, d_cur, d_next
    return p_cur - p_prev, d_cur - d_prev


def _radau_polynomial(s):
    """Monomial coefficients (lowest first) of P_s(2x-1) - P_{s-1}(2x-1)."""
    polys = [np.array([1.0]), np.array([-1.0, 2.0])]
    for k in range(1, s):
        nxt = npoly.polysub(npoly.polymul([-(2 * k + 1), 2 * (2 * k + 1)], polys[k]), k * polys[k - 1])
        polys.append(nxt / (k + 1))
    return npoly.polysub(polys[s], polys[s - 1])


def radau_nodes(s, newton_steps=3):
    """Right Radau nodes on (0, 1] in extended precision; the last node is exactly 1."""
    roots = polyroots_companion(_radau_polynomial(s)[::-1])
    if np.abs(roots.imag).max() > 1e-6:
        raise ConvergenceError("Radau polynomial produced complex nodes")
    c = np.sort(roots.real).astype(XP)
    for _ in range(newton_steps):
        f, df = _shifted_legendre_pair(s, c)
        c = c - f / df
    residual = np.abs(_shifted_legendre_pair(s, c)[0]).max()
    if residual > 1e-14:
        raise ConvergenceError("node residual %.2e above 1e-14" % residual)
    if abs(c[-1] - 1) > 1e-12:
        raise ConvergenceError("last Radau node %.17g is not 1" % c[-1])
    c[-1] = 1
    return c


def radau_iia(s):
    """The ``s``-stage RadauIIA collocation method, ``1 <= s <= 10``.

    Examples
    --------
    >>> tab = radau_iia(2)
    >>> tab.c
    array([0.33333333, 1.        ])
    """
    if not isinstance(s, (int, np.integer)) or not 1 <= s <= MAX_STAGES:
        raise ValueError("stage count must be an integer in [1, %d], got %r" % (MAX_STAGES, s))
    c = radau_nodes(int(s))
    k = np.arange(1, s + 1)
    # collocation: sum_j a_ij c_j^(k-1) = c_i^k / k
    Vt = (c[:, None] ** (k - 1)).T
    A = np.array([_solve_ext(Vt, c[i] ** k / k) for i in range(s)])
    Ad = A.astype(float)
    return ButcherTable(A=Ad, b=Ad[-1].copy(), c=c.astype(float), family="radauIIA", A_ext=A)


def verify_order(tab, kmax):
    """Residuals ``|sum_i b_i c_i^(k-1) - 1/k|`` for ``k = 1..kmax``."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    return [abs(float(tab.b @ tab.c ** (k - 1)) - 1.0 / k) for k in range(1, kmax + 1)]


def ldu_split(Ainv, pivot_tol=1e-14):
    """Doolittle elimination without pivoting: ``Ainv = L (I + Uhat)``.

    ``L`` absorbs the diagonal of the LDU factorization; ``Uhat`` is the
    strictly upper part of the unit upper factor.
    """
    Ainv = np.asarray(Ainv)
    dtype = XP if Ainv.dtype == XP else float
    Ainv = Ainv.astype(dtype)
    s = Ainv.shape[0]
    scale = max(float(np.abs(Ainv).max()), 1e-300)
    Lunit = np.eye(s, dtype=dtype)
    Up = np.zeros((s, s), dtype=dtype)
    for k in range(s):
        Up[k, k:] = Ainv[k, k:] - Lunit[k, :k] @ Up[:k, k:]
        if abs(Up[k, k]) <= pivot_tol * scale:
            raise ZeroPivotError("zero pivot at index %d" % k, k)
        for i in range(k + 1, s):
            Lunit[i, k] = (Ainv[i, k] - Lunit[i, :k] @ Up[:k, k]) / Up[k, k]
    D = np.diag(Up).copy()
    L = np.tril(Lunit * D)
    Uhat = np.triu(Up / D[:, None], 1)
    return L, Uhat


def factorize(tab):
    """Invert the Butcher matrix and split it as ``L (I + Uhat)``."""
    A = np.asarray(tab.A, dtype=float)
    s = A.shape[0]
    if np.linalg.matrix_rank(A) < s:
        raise np.linalg.LinAlgError("Butcher matrix is singular")
    A_ext = tab.A_ext if tab.A_ext is not None else A.astype(XP)
    Ainv_ext = _solve_ext(A_ext, np.eye(s, dtype=XP))
    L, Uhat = ldu_split(Ainv_ext)
    Ainv = Ainv_ext.astype(float)
    L = L.astype(float)
    Uhat = Uhat.astype(float)
    if tab.family == "radauIIA" and np.any(np.diag(L) <= 0):
        raise ArithmeticError("RadauIIA factor L has a non-positive diagonal entry")
    return IrkFactorization(
        Ainv=Ainv,
        L=L,
        Uhat=Uhat,
        uhat_norm2=spectral_norm(Uhat),
        uhat_normF=float(np.linalg.norm(Uhat)),
        l_norm2=spectral_norm(L),
        l_normF=float(np.linalg.norm(L)),
    )
