"""Pure-Python (numpy) implementations of the hot dense kernels.

These mirror ``_ckernels.pyx`` one to one and are used whenever the compiled
extension is unavailable or ``IRKPREC_PURE_PYTHON`` is set.
"""
import numpy as np

from irkprec.errors import ConvergenceError, NotPositiveDefiniteError

EPS = np.finfo(float).eps
SAFMIN = np.finfo(float).tiny
# subdiagonal entries below this fraction of ||H|| are dropped outright
NEGLIGIBLE = 1e-30
TINY = 2.0 ** -500
LIFT = 2.0 ** 600


def _givens(x, y):
    # [c s; -conj(s) c] @ [x; y] = [r; 0] with c real
    ax = abs(x)
    if ax == 0.0:
        return 0.0, 1.0 + 0.0j
    nrm = np.hypot(ax, abs(y))
    # the phase of a subnormal x is only accurate after lifting it
    xl = x * LIFT if ax < TINY else x
    alpha = xl / abs(xl)
    return ax / nrm, alpha * np.conj(y) / nrm


def hessenberg_qr(H, Z=None, wantt=False, maxit=30):
    """Complex single-shift QR iteration on an upper Hessenberg matrix.

    ``H`` is overwritten; with ``wantt`` it ends as the upper-triangular Schur
    factor. ``Z`` (if given) is post-multiplied by the accumulated rotations.
    Returns the eigenvalues in diagonal order.
    """
    n = H.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    hnorm = max(np.linalg.norm(H), SAFMIN)
    ihi = n - 1
    its = 0
    total = 0
    while ihi >= 0:
        l = 0
        for k in range(ihi, 0, -1):
            local = abs(H[k, k]) + abs(H[k - 1, k - 1])
            if local == 0.0:
                local = hnorm
            if abs(H[k, k - 1]) <= max(EPS * local, NEGLIGIBLE * hnorm, SAFMIN / EPS):
                H[k, k - 1] = 0.0
                l = k
                break
        if l == ihi:
            ihi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > maxit * n:
            raise ConvergenceError("QR iteration did not converge (%d sweeps)" % total)
        d = H[ihi, ihi]
        if its % 10 == 0:
            shift = d + 0.75 * abs(H[ihi, ihi - 1])
        else:
            a = H[ihi - 1, ihi - 1]
            half = 0.5 * (a - d)
            root = np.sqrt(half * half + H[ihi - 1, ihi] * H[ihi, ihi - 1])
            m = 0.5 * (a + d)
            e1, e2 = m + root, m - root
            shift = e1 if abs(e1 - d) <= abs(e2 - d) else e2
        jend = n if wantt else ihi + 1
        istart = 0 if wantt else l
        for k in range(l, ihi):
            if k == l:
                x = H[l, l] - shift
                y = H[l + 1, l]
                jlo = l
            else:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
                jlo = k - 1
            c, s = _givens(x, y)
            G = np.array([[c, s], [-np.conj(s), c]])
            H[k:k + 2, jlo:jend] = G @ H[k:k + 2, jlo:jend]
            if k > l:
                H[k + 1, k - 1] = 0.0
            iend = min(k + 3, ihi + 1)
            Gh = G.conj().T
            H[istart:iend, k:k + 2] = H[istart:iend, k:k + 2] @ Gh
            if Z is not None:
                Z[:, k:k + 2] = Z[:, k:k + 2] @ Gh
    return np.diag(H).copy()


def triu_eigvecs(T):
    """Eigenvectors of an upper-triangular complex matrix by back substitution.

    Column ``k`` of the result has a unit entry in row ``k`` and zeros below.
    """
    n = T.shape[0]
    X = np.zeros((n, n), dtype=complex)
    diag = np.diag(T)
    ulp = EPS
    tnorm = max(np.abs(T).max(), SAFMIN) if n else 1.0
    for k in range(n):
        lam = diag[k]
        smin = max(ulp * abs(lam), ulp * tnorm * 1e-3, SAFMIN)
        x = X[:, k]
        x[k] = 1.0
        for i in range(k - 1, -1, -1):
            den = diag[i] - lam
            if abs(den) < smin:
                den = smin
            x[i] = -np.dot(T[i, i + 1:k + 1], x[i + 1:k + 1]) / den
            big = abs(x[i])
            if big > 1e150:
                x[: k + 1] /= big
    return X


def tridiag_ql(d, e, Z=None, maxit=30):
    """Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.

    ``d`` holds the diagonal, ``e[i]`` couples ``d[i]`` and ``d[i+1]`` (the
    last entry is workspace). Both are overwritten; ``d`` ends as the
    eigenvalues (unsorted) and ``Z`` accumulates the rotations.
    """
    n = d.shape[0]
    if n > 0:
        e[n - 1] = 0.0
    tnorm = float(np.abs(d).max() + np.abs(e).max()) if n else 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= max(EPS * dd, NEGLIGIBLE * tnorm):
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > maxit:
                raise ConvergenceError("tridiagonal QL did not converge at index %d" % l)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + np.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if Z is not None:
                    zi = Z[:, i].copy()
                    zi1 = Z[:, i + 1]
                    Z[:, i] = c * zi - s * zi1
                    Z[:, i + 1] = s * zi + c * zi1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def band_cholesky(ab):
    """Cholesky factor of an SPD band matrix in row-oriented lower storage.

    ``ab[i, q]`` holds ``A[i, i - q]`` for ``q = 0..p``. The factor is
    returned in the same layout.
    """
    n, w = ab.shape
    p = w - 1
    lb = np.zeros_like(ab, dtype=float)
    # dense row window of L for the dot products
    for i in range(n):
        j0 = max(0, i - p)
        for j in range(j0, i + 1):
            k0 = max(j0, j - p)
            acc = ab[i, i - j]
            if j > k0:
                li = lb[i, i - j + 1:i - k0 + 1][::-1]
                lj = lb[j, 1:j - k0 + 1][::-1]
                acc -= np.dot(li, lj)
            if i == j:
                if not acc > 0.0:
                    raise NotPositiveDefiniteError("band matrix not positive definite at row %d" % i, i)
                lb[i, 0] = np.sqrt(acc)
            else:
                lb[i, i - j] = acc / lb[j, 0]
    return lb


def band_solve(lb, rhs):
    """Solve ``L L^T x = rhs`` with ``L`` from :func:`band_cholesky`."""
    n, w = lb.shape
    p = w - 1
    y = np.array(rhs, dtype=float)
    for i in range(n):
        k0 = max(0, i - p)
        if i > k0:
            y[i] -= np.dot(lb[i, 1:i - k0 + 1], y[i - 1:k0 - 1 if k0 > 0 else None:-1])
        y[i] /= lb[i, 0]
    for i in range(n - 1, -1, -1):
        k1 = min(n - 1, i + p)
        if k1 > i:
            idx = np.arange(i + 1, k1 + 1)
            y[i] -= np.dot(lb[idx, idx - i], y[i + 1:k1 + 1])
        y[i] /= lb[i, 0]
    return y
