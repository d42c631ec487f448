# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the dense kernels in ``_pykernels``."""
import numpy as np

cimport cython
from libc.math cimport sqrt, fabs, hypot, copysign

from irkprec.errors import ConvergenceError, NotPositiveDefiniteError

cdef extern from "complex.h":
    double cabs(double complex) nogil
    double complex conj(double complex) nogil
    double complex csqrt(double complex) nogil

cdef double EPS = np.finfo(float).eps
cdef double SAFMIN = np.finfo(float).tiny
cdef double NEGLIGIBLE = 1e-30
cdef double TINY = 2.0 ** -500
cdef double LIFT = 2.0 ** 600


cdef inline void _givens(double complex x, double complex y, double *c, double complex *s) nogil:
    cdef double ax = cabs(x)
    cdef double nrm
    cdef double complex xl = x
    if ax == 0.0:
        c[0] = 0.0
        s[0] = 1.0
        return
    nrm = hypot(ax, cabs(y))
    c[0] = ax / nrm
    # the phase of a subnormal x is only accurate after lifting it
    if ax < TINY:
        xl = x * LIFT
    s[0] = (xl / cabs(xl)) * conj(y) / nrm


def hessenberg_qr(double complex[:, ::1] H, Z=None, bint wantt=False, int maxit=30):
    cdef Py_ssize_t n = H.shape[0]
    cdef Py_ssize_t ihi, l, k, j, i, jlo, jend, istart, iend
    cdef double complex[:, ::1] Zv
    cdef bint wantz = Z is not None
    cdef double hnorm, local, fro = 0.0, c
    cdef double complex s, x, y, t1, t2, a, d, half, root, m, e1, e2, shift
    cdef long its = 0, total = 0
    if n == 0:
        return np.zeros(0, dtype=complex)
    if wantz:
        Zv = Z
    for i in range(n):
        for j in range(n):
            fro += cabs(H[i, j]) ** 2
    hnorm = max(sqrt(fro), SAFMIN)
    ihi = n - 1
    while ihi >= 0:
        l = 0
        k = ihi
        while k > 0:
            local = cabs(H[k, k]) + cabs(H[k - 1, k - 1])
            if local == 0.0:
                local = hnorm
            if cabs(H[k, k - 1]) <= max(EPS * local, NEGLIGIBLE * hnorm, SAFMIN / EPS):
                H[k, k - 1] = 0.0
                l = k
                break
            k -= 1
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
            shift = d + 0.75 * cabs(H[ihi, ihi - 1])
        else:
            a = H[ihi - 1, ihi - 1]
            half = 0.5 * (a - d)
            root = csqrt(half * half + H[ihi - 1, ihi] * H[ihi, ihi - 1])
            m = 0.5 * (a + d)
            e1 = m + root
            e2 = m - root
            shift = e1 if cabs(e1 - d) <= cabs(e2 - d) else e2
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
            _givens(x, y, &c, &s)
            for j in range(jlo, jend):
                t1 = H[k, j]
                t2 = H[k + 1, j]
                H[k, j] = c * t1 + s * t2
                H[k + 1, j] = -conj(s) * t1 + c * t2
            if k > l:
                H[k + 1, k - 1] = 0.0
            iend = k + 3 if k + 3 < ihi + 1 else ihi + 1
            for i in range(istart, iend):
                t1 = H[i, k]
                t2 = H[i, k + 1]
                H[i, k] = c * t1 + conj(s) * t2
                H[i, k + 1] = -s * t1 + c * t2
            if wantz:
                for i in range(n):
                    t1 = Zv[i, k]
                    t2 = Zv[i, k + 1]
                    Zv[i, k] = c * t1 + conj(s) * t2
                    Zv[i, k + 1] = -s * t1 + c * t2
    out = np.empty(n, dtype=complex)
    cdef double complex[::1] ov = out
    for i in range(n):
        ov[i] = H[i, i]
    return out


def triu_eigvecs(double complex[:, ::1] T):
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double tnorm = SAFMIN, smin, big
    cdef double complex lam, den, acc
    X = np.zeros((n, n), dtype=complex)
    cdef double complex[:, ::1] Xv = X
    for i in range(n):
        for j in range(i, n):
            if cabs(T[i, j]) > tnorm:
                tnorm = cabs(T[i, j])
    for k in range(n):
        lam = T[k, k]
        smin = max(EPS * cabs(lam), EPS * tnorm * 1e-3, SAFMIN)
        Xv[k, k] = 1.0
        for i in range(k - 1, -1, -1):
            den = T[i, i] - lam
            if cabs(den) < smin:
                den = smin
            acc = 0.0
            for j in range(i + 1, k + 1):
                acc = acc + T[i, j] * Xv[j, k]
            Xv[i, k] = -acc / den
            big = cabs(Xv[i, k])
            if big > 1e150:
                for j in range(k + 1):
                    Xv[j, k] = Xv[j, k] / big
    return X


def tridiag_ql(double[::1] d, double[::1] e, Z=None, int maxit=30):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i, k
    cdef double dd, g, r, s, c, p, f, b, zt, tnorm = 0.0, emax = 0.0
    cdef int it
    cdef bint underflow
    cdef bint wantz = Z is not None
    cdef double[:, ::1] Zv
    if wantz:
        Zv = Z
    if n > 0:
        e[n - 1] = 0.0
    for i in range(n):
        tnorm = max(tnorm, fabs(d[i]))
        emax = max(emax, fabs(e[i]))
    tnorm += emax
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= max(EPS * dd, NEGLIGIBLE * tnorm):
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > maxit:
                raise ConvergenceError("tridiagonal QL did not converge at index %d" % l)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
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
                if wantz:
                    for k in range(Zv.shape[0]):
                        zt = Zv[k, i + 1]
                        Zv[k, i + 1] = s * Zv[k, i] + c * zt
                        Zv[k, i] = c * Zv[k, i] - s * zt
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def band_cholesky(double[:, ::1] ab):
    cdef Py_ssize_t n = ab.shape[0], p = ab.shape[1] - 1
    cdef Py_ssize_t i, j, k, j0
    cdef double acc
    lb = np.zeros((n, p + 1))
    cdef double[:, ::1] L = lb
    for i in range(n):
        j0 = i - p if i > p else 0
        for j in range(j0, i + 1):
            acc = ab[i, i - j]
            for k in range(j0, j):
                acc -= L[i, i - k] * L[j, j - k]
            if i == j:
                if not acc > 0.0:
                    raise NotPositiveDefiniteError("band matrix not positive definite at row %d" % i, i)
                L[i, 0] = sqrt(acc)
            else:
                L[i, i - j] = acc / L[j, 0]
    return lb


def band_solve(double[:, ::1] lb, rhs):
    cdef Py_ssize_t n = lb.shape[0], p = lb.shape[1] - 1
    cdef Py_ssize_t i, k, k0, k1
    y = np.array(rhs, dtype=float)
    cdef double[::1] yv = y
    for i in range(n):
        k0 = i - p if i > p else 0
        for k in range(k0, i):
            yv[i] -= lb[i, i - k] * yv[k]
        yv[i] /= lb[i, 0]
    for i in range(n - 1, -1, -1):
        k1 = i + p if i + p < n - 1 else n - 1
        for k in range(i + 1, k1 + 1):
            yv[i] -= lb[k, k - i] * yv[k]
        yv[i] /= lb[i, 0]
    return y
