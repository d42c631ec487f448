"""The spectral GMRES bound ``||r_l|| / ||r_0|| <= kappa(S) min_phi max_i |phi(lam_i)|``."""
from dataclasses import dataclass

import numpy as np

from irkprec.smalldense import cond2
from irkprec.spectrum import lift_eigenvector, mode_spectrum_matrix


@dataclass(frozen=True)
class MinmaxResult:
    """``value = max_i |phi(z_i)|``; ``phi`` holds coefficients highest first with ``phi(0) = 1``.

    ``lower`` is a certified lower bound on the optimum, so the returned
    value is within ``value - lower`` of it.
    """

    value: float
    phi: np.ndarray
    iterations: int = 0
    lower: float = 0.0


@dataclass(frozen=True)
class BoundCurve:
    ell: np.ndarray
    minmax: np.ndarray
    bound: np.ndarray
    kappa: float
    points: np.ndarray


def dedupe(points, tol=1e-10):
    """Distinct points up to ``tol`` (first occurrence kept, deterministic order)."""
    pts = np.asarray(points, dtype=complex).ravel()
    out = []
    for z in pts[np.lexsort((pts.imag, pts.real))]:
        if not out or np.min(np.abs(np.asarray(out) - z)) > tol:
            out.append(z)
    return np.array(out, dtype=complex)


def eigenvector_matrix(spec):
    """Columns ``svec (x) q_k`` (2-normalized) from every mode; ``None`` if a mode is defective."""
    Q = spec.pencil.Q
    cols = []
    for k, mode in enumerate(spec.modes):
        ms = mode_spectrum_matrix(spec.factorization, mode.mu, vectors=True)
        lam = ms.lambdas
        if lam.size > 1:
            gaps = np.abs(lam[:, None] - lam[None, :])
            np.fill_diagonal(gaps, np.inf)
            if gaps.min() <= 1e-10:
                return None
        for j in range(lam.size):
            v = lift_eigenvector(ms.vectors[:, j], Q[:, k])
            cols.append(v / np.linalg.norm(v))
    return np.column_stack(cols)


def kappa_S(fs, spec):
    """2-norm condition number of the lifted eigenvector matrix, ``inf`` if not diagonalizable."""
    if spec.pencil is None:
        raise ValueError("spectrum carries no pencil eigenbasis")
    S = eigenvector_matrix(spec)
    if S is None:
        return np.inf
    if fs is not None and S.shape[0] != fs.size:
        raise ValueError("spectrum and full system have different sizes")
    return cond2(S)


def _interpolating_phi(points):
    # phi(z) = prod (1 - z / z_i)
    phi = np.array([1.0 + 0j])
    for z in points:
        phi = np.polymul(phi, [-1.0 / z, 1.0])
    return phi


def _arnoldi_basis(z, ell):
    """Orthonormal basis (columns) of ``{1, z, ..., z^(ell-1)}`` on the points, plus monomial coefficients."""
    m = z.size
    P = np.zeros((m, ell), dtype=complex)
    C = np.zeros((ell, ell), dtype=complex)  # C[:, j] lowest-first coefficients of column j
    P[:, 0] = 1.0 / np.sqrt(m)
    C[0, 0] = 1.0 / np.sqrt(m)
    for j in range(1, ell):
        w = z * P[:, j - 1]
        c = np.zeros(ell, dtype=complex)
        c[1:] = C[:-1, j - 1]
        for _ in range(2):
            h = P[:, :j].conj().T @ w
            w = w - P[:, :j] @ h
            c = c - C[:, :j] @ h
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return P[:, :j], C[:j, :j]
        P[:, j] = w / nrm
        C[:, j] = c / nrm
    return P, C


def minmax_poly(points, ell, maxiter=20000, gap=1e-10):
    """Discrete complex Chebyshev problem ``min_{phi(0)=1, deg <= ell} max_i |phi(z_i)|``.

    Solved by Lawson's iteratively reweighted least squares in a
    discrete-orthogonal basis. For probability weights ``w`` the weighted
    least-squares residual ``sqrt(sum w |e|^2)`` never exceeds the optimum, so
    iteration stops once the max error is within ``gap`` of that lower bound.
    ``phi`` is returned highest degree first.
    """
    z = dedupe(points)
    if z.size == 0:
        raise ValueError("need at least one point")
    if np.any(z == 0):
        raise ValueError("points must be nonzero")
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    if ell == 0:
        return MinmaxResult(1.0, np.array([1.0]), lower=1.0)
    if ell >= z.size:
        phi = _interpolating_phi(z)
        if _closed(z):
            phi = phi.real
        return MinmaxResult(0.0, np.concatenate([np.zeros(ell - z.size), phi]))
    P, C = _arnoldi_basis(z, ell)
    B = z[:, None] * P
    w = np.full(z.size, 1.0 / z.size)
    best = (np.inf, None)
    lower = 0.0
    it = 0
    for it in range(1, maxiter + 1):
        sw = np.sqrt(w)
        d = np.linalg.lstsq(sw[:, None] * B, -sw, rcond=None)[0]
        err = np.abs(1.0 + B @ d)
        emax = err.max()
        if emax < best[0]:
            best = (emax, d)
        lower = max(lower, float(np.sqrt(w @ err**2)))
        if best[0] - lower <= gap:
            break
        w = w * err
        total = w.sum()
        if total == 0.0:
            break
        w /= total
    value, d = best
    # phi(z) = 1 + z * sum_j d_j p_j(z)
    low = np.concatenate([[1.0], C @ d])
    phi = low[::-1]
    if _closed(z):
        phi = phi.real
    return MinmaxResult(float(value), phi, it, lower)


def _closed(z):
    return np.allclose(np.sort_complex(z), np.sort_complex(z.conj()), atol=1e-10)


def bound_curve(fs, spec, L, kappa=None):
    """``kappa(S) * minmax(l)`` for ``l = 0..L``; minmax made nonincreasing by a running minimum."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    pts = dedupe(spec.values())
    kap = kappa_S(fs, spec) if kappa is None else float(kappa)
    raw = np.array([minmax_poly(pts, l).value for l in range(L + 1)])
    mm = np.minimum.accumulate(raw)
    with np.errstate(invalid="ignore"):
        bnd = np.where(mm == 0, 0.0, kap * mm)
    return BoundCurve(np.arange(L + 1), mm, bnd, kap, pts)
