"""Spectral analysis and block preconditioning of RadauIIA stage systems."""
__version__ = "0.1.0"

from irkprec.kernels import BACKEND
from irkprec.tableau import ButcherTable, IrkFactorization, factorize, radau_iia

__all__ = ["BACKEND", "ButcherTable", "IrkFactorization", "factorize", "radau_iia", "__version__"]
