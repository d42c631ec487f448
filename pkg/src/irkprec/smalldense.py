"""Dense kernels: Hessenberg/QR eigensolvers, Cholesky, companion roots, norms.

Everything here works on plain numpy arrays. Eigenvalue multisets are
returned as 1-D complex arrays.
"""
import numpy as np
from scipy.linalg import solve_triangular

from irkprec import kernels
from irkprec.errors import NotPositiveDefiniteError

__all__ = [
    "balance",
    "hessenberg",
    "eig_dense",
    "polyroots_companion",
    "companion",
    "eigh",
    "eig_spd",
    "cholesky",
    "cond2",
    "spectral_norm",
    "bandwidth",
    "to_band",
    "match_spectra",
    "is_conjugate_closed",
    "solve_lower",
]


def hessenberg(A, calc_q=True):
    """Householder reduction ``A = Q H Q^H`` with ``H`` upper Hessenberg."""
    A = np.asarray(A)
    dtype = complex if np.iscomplexobj(A) else float
    H = np.array(A, dtype=dtype, order="C")
    n = H.shape[0]
    Q = np.eye(n, dtype=dtype) if calc_q else None
    for k in range(n - 2):
        x = H[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        vc = v.conj()
        H[k + 1:, k:] -= 2.0 * np.outer(v, vc @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, vc)
        if calc_q:
            Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, vc)
        H[k + 2:, k] = 0.0
    return H, Q


def balance(A, sweeps=20):
    """Power-of-two diagonal scaling ``D^-1 A D`` equalizing row and column norms."""
    B = np.array(A, dtype=np.result_type(A, float), order="C")
    n = B.shape[0]
    d = np.ones(n)
    for _ in range(sweeps):
        done = True
        for i in range(n):
            c = np.linalg.norm(B[:, i]) - abs(B[i, i])
            r = np.linalg.norm(B[i, :]) - abs(B[i, i])
            if c <= 0.0 or r <= 0.0:
                continue
            f = 2.0 ** np.round(0.5 * np.log2(r / c))
            if f != 1.0 and (c * c * f * f + r * r / (f * f)) < 0.95 * (c * c + r * r):
                B[:, i] *= f
                B[i, :] /= f
                d[i] *= f
                done = False
        if done:
            break
    return B, d


def _pair_conjugates(w, V, scale):
    """Make the spectrum of a real matrix exactly conjugate-closed."""
    snap = 1e-13 * scale
    w = w.copy()
    small = np.abs(w.imag) <= snap
    w[small] = w[small].real
    pos = [i for i in range(len(w)) if w[i].imag > 0]
    neg = [i for i in range(len(w)) if w[i].imag < 0]
    for i in pos:
        if not neg:
            break
        j = min(neg, key=lambda t: abs(w[t] - np.conj(w[i])))
        neg.remove(j)
        re = 0.5 * (w[i].real + w[j].real)
        im = 0.5 * (w[i].imag - w[j].imag)
        w[i] = complex(re, im)
        w[j] = complex(re, -im)
        if V is not None:
            V[:, j] = V[:, i].conj()
    return w


def eig_dense(A, vectors=False):
    """Eigenvalues (and optionally unit-norm right eigenvectors) of a square matrix.

    Balancing (values only) and Hessenberg reduction followed by shifted
    complex QR. For
    real input the returned spectrum is exactly closed under conjugation.

    Parameters
    ----------
    A : (m, m) array_like
    vectors : bool
        Also return the eigenvector matrix (columns normalized in 2-norm).
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("eig_dense needs a square matrix, got shape %r" % (A.shape,))
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    m = A.shape[0]
    if m == 0:
        raise ValueError("empty matrix")
    real = not np.iscomplexobj(A)
    # power-of-two norm scaling keeps the QR sweep away from under/overflow
    amax = float(np.abs(A).max())
    if amax == 0.0:
        w = np.zeros(m, dtype=complex)
        return (w, np.eye(m, dtype=complex)) if vectors else w
    gscale = 2.0 ** np.round(np.log2(amax))
    # balancing sharpens eigenvalues but can wreck eigenvector accuracy when the
    # scaling spans many orders of magnitude, so it is used for values only
    if vectors:
        Ab, dscale = A / gscale, np.ones(m)
    else:
        Ab, dscale = balance(A / gscale)
    if np.all(np.tril(Ab, -2) == 0):
        H = np.array(Ab, dtype=complex, order="C")
        Z = np.eye(m, dtype=complex) if vectors else None
    else:
        H, Q = hessenberg(Ab, calc_q=vectors)
        H = np.ascontiguousarray(H, dtype=complex)
        Z = np.ascontiguousarray(Q, dtype=complex) if vectors else None
    w = kernels.hessenberg_qr(H, Z, wantt=vectors) * gscale
    V = None
    if vectors:
        V = dscale[:, None] * (Z @ kernels.triu_eigvecs(H))
        V /= np.linalg.norm(V, axis=0)
    if real:
        w = _pair_conjugates(w, V, gscale * np.linalg.norm(A / gscale))
    return (w, V) if vectors else w


def companion(coeffs):
    """Upper-Hessenberg companion matrix of a monic polynomial (highest degree first)."""
    c = np.asarray(coeffs)
    d = len(c) - 1
    C = np.zeros((d, d), dtype=np.result_type(c.dtype, float))
    C[0, :] = -c[1:] / c[0]
    C[np.arange(1, d), np.arange(d - 1)] = 1.0
    return C


def polyroots_companion(coeffs):
    """Roots of a polynomial given by coefficients, highest degree first.

    Trailing zero coefficients give exact zero roots; the remaining factor
    is rooted as the eigenvalues of its companion matrix.
    """
    c = np.atleast_1d(np.asarray(coeffs))
    if c.ndim != 1 or len(c) < 2:
        raise ValueError("polynomial must have degree >= 1")
    if c[0] == 0:
        raise ValueError("leading coefficient is zero")
    c = c / c[0]
    nz = 0
    while nz < len(c) - 1 and c[len(c) - 1 - nz] == 0:
        nz += 1
    core = c[: len(c) - nz]
    roots = np.zeros(nz, dtype=complex)
    if len(core) > 1:
        roots = np.concatenate([eig_dense(companion(core)), roots])
    return roots


def eigh(A, vectors=True):
    """Symmetric eigendecomposition: tridiagonalization plus implicit QL.

    Returns ascending eigenvalues and (optionally) orthonormal eigenvectors.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    amax = float(np.abs(A).max()) if n else 0.0
    gscale = 2.0 ** np.round(np.log2(amax)) if amax > 0 else 1.0
    T, Q = hessenberg(A / gscale, calc_q=vectors)
    d = np.array(np.diag(T), dtype=float)
    e = np.zeros(n)
    e[: n - 1] = np.diag(T, -1)
    Z = np.ascontiguousarray(Q) if vectors else None
    kernels.tridiag_ql(d, e, Z)
    d *= gscale
    order = np.argsort(d, kind="stable")
    if vectors:
        return d[order], Z[:, order]
    return d[order]


def eig_spd(A):
    """Eigen-decomposition of a symmetric positive definite matrix.

    Raises ``NotPositiveDefiniteError`` if an eigenvalue is negative beyond
    roundoff, ``ValueError`` if ``A`` is not symmetric to 1e-12.
    """
    A = np.asarray(A, dtype=float)
    scale = max(np.abs(A).max(), 1e-300)
    if np.abs(A - A.T).max() > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    w, V = eigh(0.5 * (A + A.T))
    if w[0] < -1e-12 * max(abs(w[-1]), 1e-300):
        raise NotPositiveDefiniteError("matrix has a negative eigenvalue %.3e" % w[0])
    return w, V


def bandwidth(A):
    """Lower bandwidth of a (symmetric) matrix from its nonzero pattern."""
    rows, cols = np.nonzero(np.asarray(A))
    return int(np.max(rows - cols, initial=0))


def to_band(A, p=None):
    """Row-oriented lower band storage ``ab[i, q] = A[i, i - q]``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    p = bandwidth(A) if p is None else p
    ab = np.zeros((n, p + 1))
    for q in range(p + 1):
        ab[q:, q] = np.diagonal(A, -q)
    return ab


def cholesky(A):
    """Lower-triangular ``G`` with ``A = G G^T`` (band-aware)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    p = bandwidth(A)
    lb = kernels.band_cholesky(to_band(A, p))
    G = np.zeros((n, n))
    for q in range(p + 1):
        G[np.arange(q, n), np.arange(0, n - q)] = lb[q:, q]
    return G


def solve_lower(L, B):
    return solve_triangular(L, B, lower=True)


def _gram_eigenvalues(A):
    A = np.asarray(A)
    if np.iscomplexobj(A):
        G = A.conj().T @ A
        R = np.block([[G.real, -G.imag], [G.imag, G.real]])
    else:
        R = A.T @ A
    return eigh(0.5 * (R + R.T), vectors=False)


def spectral_norm(A):
    """2-norm of a matrix via the largest Gram eigenvalue."""
    w = _gram_eigenvalues(A)
    return float(np.sqrt(max(w[-1], 0.0)))


def cond2(A):
    """2-norm condition number; ``inf`` when numerically singular."""
    w = _gram_eigenvalues(A)
    lmax = w[-1]
    lmin = w[0]
    if lmax <= 0.0 or lmin <= 1e-14 * lmax:
        return np.inf
    return float(np.sqrt(lmax / lmin))


def match_spectra(a, b):
    """Greedy nearest-neighbour matching of two equal-size multisets.

    Both sets are sorted by (real, imag); each entry of ``a`` takes the
    closest unused entry of ``b``. Returns the largest matched distance.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("spectra have different sizes: %d vs %d" % (a.size, b.size))
    ia = np.lexsort((a.imag, a.real))
    ib = list(np.lexsort((b.imag, b.real)))
    worst = 0.0
    for i in ia:
        dist = np.abs(b[ib] - a[i])
        j = int(np.argmin(dist))
        worst = max(worst, float(dist[j]))
        ib.pop(j)
    return worst


def is_conjugate_closed(values, tol=1e-9):
    """True if the multiset maps onto itself under conjugation within ``tol``."""
    values = np.asarray(values, dtype=complex)
    return match_spectra(values, values.conj()) <= tol
