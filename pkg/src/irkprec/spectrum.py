"""Per-mode spectra of the preconditioned stage operator.

Every generalized eigenvalue ``mu`` of the spatial pencil contributes the ``s``
eigenvalues of the mode matrix ``X_mu = (L + mu I)^-1 (Ainv + mu I)``. Three
independent routes are provided (direct, pencil ``(Uhat, I + mu L^-1)``, and
characteristic polynomial roots) together with branch tracking in ``mu``.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.linalg import solve_triangular
from scipy.optimize import linear_sum_assignment, minimize_scalar

from irkprec.smalldense import eig_dense, polyroots_companion, spectral_norm

METHODS = ("matrix", "pencil", "charpoly")


@dataclass(frozen=True)
class ModeSpectrum:
    """The ``s`` eigenvalues of the preconditioned operator attached to one ``mu``."""

    mu: float
    lambdas: np.ndarray
    method: str
    vectors: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class SpectrumResult:
    modes: List[ModeSpectrum]
    factorization: object = field(repr=False)
    pencil: object = field(default=None, repr=False)
    label: str = ""

    def values(self):
        """All ``n*s`` eigenvalues, mode by mode."""
        if not self.modes:
            return np.zeros(0, dtype=complex)
        return np.concatenate([m.lambdas for m in self.modes])

    def count_near(self, z=1.0, tol=1e-9):
        return int(np.count_nonzero(np.abs(self.values() - z) <= tol))


@dataclass(frozen=True)
class MergePoint:
    """A conjugate pair meeting the real axis at ``mu``; ``gap`` is the residual split."""

    mu: float
    lam: float
    gap: float


@dataclass(frozen=True)
class BranchSet:
    """``values[j, i]`` is branch ``i`` at ``mu[j]``."""

    mu: np.ndarray
    values: np.ndarray
    merges: List[MergePoint]
    jumps: List[tuple] = field(default_factory=list)

    @property
    def s(self):
        return self.values.shape[1]

    def branch(self, i):
        return self.values[:, i]


def _check_mu(f, mu):
    if not np.isfinite(mu) or mu < 0:
        raise ValueError("mu must be finite and nonnegative, got %r" % mu)
    if np.any(np.diag(f.L) + mu == 0):
        raise ArithmeticError("L + mu I is singular at mu=%r" % mu)


def canonical_order(values):
    """Deterministic ordering: decreasing real part, then increasing imaginary part."""
    values = np.asarray(values, dtype=complex)
    return np.lexsort((values.imag, -np.round(values.real, 12)))


def mode_matrix(f, mu):
    """``X_mu = (L + mu I)^-1 (Ainv + mu I)``."""
    _check_mu(f, mu)
    I = np.eye(f.s)
    return solve_triangular(f.L + mu * I, f.Ainv + mu * I, lower=True)


def _linv(f):
    return solve_triangular(f.L, np.eye(f.s), lower=True)


def defect_matrix(f, mu):
    """``(I + mu L^-1)^-1 Uhat``, so that ``X_mu = I + defect_matrix(f, mu)``."""
    _check_mu(f, mu)
    W = np.eye(f.s) + mu * _linv(f)
    return solve_triangular(W, f.Uhat, lower=True)


def _finish(mu, lam, method, V=None):
    order = canonical_order(lam)
    return ModeSpectrum(float(mu), lam[order], method, None if V is None else V[:, order])


def mode_spectrum_matrix(f, mu, vectors=False):
    X = mode_matrix(f, mu)
    if vectors:
        w, V = eig_dense(X, vectors=True)
        return _finish(mu, w, "matrix", V)
    return _finish(mu, eig_dense(X), "matrix")


def mode_spectrum_pencil(f, mu):
    """Generalized eigenvalues of ``(Uhat, I + mu L^-1)`` shifted by one."""
    return _finish(mu, 1.0 + eig_dense(defect_matrix(f, mu)), "pencil")


def mode_charpoly(f, mu):
    """Monic coefficients (highest first) of ``p(lam) = det(lam (I + mu L^-1) - Uhat)``.

    The determinant is sampled at ``s+1`` Chebyshev points on ``[-rho, rho]``,
    ``rho = ||(I + mu L^-1)^-1 Uhat||_2``, and interpolated. The constant term
    is exactly zero because ``Uhat`` is singular.
    """
    _check_mu(f, mu)
    s = f.s
    W = np.eye(s) + mu * _linv(f)
    rho = spectral_norm(solve_triangular(W, f.Uhat, lower=True))
    if rho == 0.0:
        rho = 1.0
    t = np.cos((2 * np.arange(s + 1) + 1) * np.pi / (2 * (s + 1)))
    vals = [np.linalg.det(rho * tj * W - f.Uhat) for tj in t]
    power = cheb.cheb2poly(cheb.chebfit(t, vals, s))
    power = np.concatenate([power, np.zeros(s + 1 - power.size)])
    coeffs = (power / rho ** np.arange(s + 1))[::-1]
    coeffs = coeffs / coeffs[0]
    coeffs[-1] = 0.0
    return coeffs


def mode_spectrum_charpoly(f, mu):
    return _finish(mu, 1.0 + polyroots_companion(mode_charpoly(f, mu)), "charpoly")


_DISPATCH = {
    "matrix": mode_spectrum_matrix,
    "pencil": mode_spectrum_pencil,
    "charpoly": mode_spectrum_charpoly,
}


def mode_spectrum(f, mu, method="matrix"):
    try:
        fn = _DISPATCH[method]
    except KeyError:
        raise ValueError("unknown method %r; expected one of %s" % (method, ", ".join(METHODS)))
    return fn(f, mu)


def full_spectrum(f, pe, method="matrix", label=""):
    """One :class:`ModeSpectrum` per pencil eigenvalue, in ascending ``mu``."""
    modes = [mode_spectrum(f, float(mu), method) for mu in pe.mu]
    return SpectrumResult(modes, f, pe, label)


def lift_eigenvector(svec, q):
    """Stage-major ``s (x) q``: stage block ``i`` is ``svec[i] * q``."""
    return np.kron(np.asarray(svec), np.asarray(q))


def _match(pred, new):
    cost = np.abs(pred[:, None] - new[None, :])
    rows, cols = linear_sum_assignment(cost)
    out = np.empty_like(new)
    out[rows] = new[cols]
    return out


def _complex_count(w, tol=1e-12):
    return int(np.count_nonzero(np.abs(w.imag) > tol))


def _closest_real_pair(w):
    r = np.sort(w[np.abs(w.imag) <= 1e-12].real)
    k = int(np.argmin(np.diff(r)))
    return r[k], r[k + 1]


def _locate_merge(f, mu_lo, mu_hi, maxit=200):
    """Bisect in ``log mu`` on the number of non-real eigenvalues."""
    def count(logmu):
        return _complex_count(eig_dense(mode_matrix(f, np.exp(logmu))))

    lo, hi = np.log(mu_lo), np.log(mu_hi)
    c_lo, c_hi = count(lo), count(hi)
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if count(mid) == c_lo:
            lo = mid
        else:
            hi = mid
    # report from the side where the pair is real
    side = lo if c_lo < c_hi else hi
    a, b = _closest_real_pair(eig_dense(mode_matrix(f, np.exp(side))))
    return MergePoint(float(np.exp(side)), float(0.5 * (a + b)), float(b - a))


def follow_branches(mu, raw):
    """Order each spectrum in ``raw`` so that column ``i`` traces one branch over ``mu``.

    ``mu`` must be nondecreasing. The linear prediction is used only while
    the step grows by at most 1.5x; on coarser grids plain nearest matching is
    safer. Returns ``(values, jumps)`` with ``jumps`` the ``(j, i)`` steps exceeding
    the adaptive bound.
    """
    mu = np.asarray(mu, dtype=float)
    vals = np.empty((mu.size, len(raw[0])), dtype=complex)
    vals[0] = raw[0]
    slope = np.zeros(vals.shape[1], dtype=complex)
    prev_dmu = 0.0
    jumps = []
    for j in range(1, mu.size):
        dmu = mu[j] - mu[j - 1]
        use = dmu <= 1.5 * prev_dmu
        vals[j] = _match(vals[j - 1] + (slope * dmu if use else 0.0), raw[j])
        if j >= 2:
            bound = 10.0 * dmu * np.abs(slope) + 1e-6
            step = np.abs(vals[j] - vals[j - 1])
            jumps.extend((j, int(i)) for i in np.flatnonzero(step > bound))
        if dmu > 0:
            slope = (vals[j] - vals[j - 1]) / dmu
            prev_dmu = dmu
    return vals, jumps


def track_branches(f, mu_grid):
    """Follow the ``s`` eigenvalues of ``X_mu`` across an ascending ``mu`` grid.

    Consecutive spectra are matched by minimum-cost assignment against a linear
    prediction. A step larger than ``10 * dmu * slope + 1e-6`` is recorded in
    ``jumps``. Merge points are located by bisection in ``log mu`` on the
    number of non-real eigenvalues.
    """
    mu = np.asarray(mu_grid, dtype=float)
    if mu.ndim != 1 or mu.size < 2:
        raise ValueError("need at least two grid points")
    if np.any(np.diff(mu) <= 0):
        raise ValueError("mu grid must be strictly ascending")
    raw = [mode_spectrum_matrix(f, m).lambdas for m in mu]
    vals, jumps = follow_branches(mu, raw)
    merges = []
    counts = [_complex_count(w) for w in raw]
    for j in range(1, mu.size):
        if counts[j] == counts[j - 1]:
            continue
        merges.append(_locate_merge(f, mu[j - 1], mu[j]))
    return BranchSet(mu, vals, merges, jumps)


def branch_minimum(f, mu_lo, mu_hi):
    """Minimize the smallest real eigenvalue of ``X_mu`` over ``[mu_lo, mu_hi]``.

    Returns ``(mu_star, lam_star)``. Intended for real branches such as the
    nontrivial ``s=2`` branch.
    """
    def g(logmu):
        return float(np.min(mode_spectrum_matrix(f, np.exp(logmu)).lambdas.real))

    res = minimize_scalar(g, bounds=(np.log(mu_lo), np.log(mu_hi)), method="bounded",
                          options={"xatol": 1e-12})
    return float(np.exp(res.x)), float(res.fun)
