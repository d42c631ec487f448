"""Backend selection for the hot dense kernels.

The compiled extension ``irkprec._ckernels`` is used when it imports; the
numpy implementation in ``irkprec._pykernels`` is the fallback. Setting the
environment variable ``IRKPREC_PURE_PYTHON=1`` forces the fallback.
"""
import os

from irkprec import _pykernels

try:
    if os.environ.get("IRKPREC_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from irkprec import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

hessenberg_qr = _impl.hessenberg_qr
triu_eigvecs = _impl.triu_eigvecs
tridiag_ql = _impl.tridiag_ql
band_cholesky = _impl.band_cholesky
band_solve = _impl.band_solve


def available_backends():
    """Return ``{name: module}`` for every importable kernel backend."""
    out = {"python": _pykernels}
    try:
        from irkprec import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
