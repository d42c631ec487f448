"""Exceptions raised by irkprec."""
import numpy as np


class ConvergenceError(RuntimeError):
    """An iterative kernel (QR, QL, Newton, GMRES) failed to converge."""


class ZeroPivotError(ArithmeticError):
    """Elimination without pivoting hit a (numerically) zero pivot."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
