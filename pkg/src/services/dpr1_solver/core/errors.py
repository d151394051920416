from __future__ import annotations

from typing import Optional

import numpy as np


class PoleError(ZeroDivisionError):
    """Raised when a secular quantity is evaluated at a diagonal entry."""

    def __init__(self, lam: complex, index: int):
        super().__init__(f"lambda={lam} coincides with diagonal entry {index}")
        self.lam = lam
        self.index = index


class Dpr1ConvergenceError(RuntimeError):
    """MRQI failed for one eigenvalue even after the step size hit its floor.

    ``partial_values`` holds every eigenvalue accepted before the failure.
    """

    def __init__(
        self,
        message: str,
        partial_values: Optional[np.ndarray] = None,
        failed_step: int = -1,
        eta: float = 0.0,
    ):
        super().__init__(message)
        self.partial_values = np.asarray(partial_values if partial_values is not None else [], dtype=complex)
        self.failed_step = failed_step
        self.eta = eta


class DefectiveMatrixError(ArithmeticError):
    """A left/right eigenvector pair is orthogonal, so the matrix is not diagonalizable."""
