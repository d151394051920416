from __future__ import annotations

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator


class ModalForm(BaseModel):
    """Viscosity-independent factors of the damped linearization.

    The linearized matrix in modal, shuffled and block-diagonalized
    coordinates is diag(D) - U diag(v) Z^T for every viscosity vector v.

    Psi and Psi_inv hold the n 2x2 diagonalizing blocks (shape (n, 2, 2));
    block i acts on entries 2i and 2i+1 of the shuffled vector.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    Phi: np.ndarray = Field(..., description="M-orthonormal modes, Phi^T M Phi = I")
    Omega: np.ndarray = Field(..., description="Undamped frequencies, strictly descending")
    Psi: np.ndarray = Field(..., description="2x2 eigenvector blocks of each modal block D_i")
    Psi_inv: np.ndarray = Field(..., description="Inverses of the Psi blocks")
    shuffle: np.ndarray = Field(..., description="Perfect shuffle as an index array")
    D: np.ndarray = Field(..., description="Eigenvalues of the undamped-by-dampers linearization")
    PhiTG: np.ndarray = Field(..., description="Damper geometry in modal coordinates")
    U: np.ndarray
    Z: np.ndarray
    alpha: float = Field(..., ge=0.0)

    @field_validator("Phi", "Omega", "Psi", "Psi_inv", "shuffle", "D", "PhiTG", "U", "Z", mode="after")
    @classmethod
    def _freeze(cls, value: np.ndarray) -> np.ndarray:
        if value.flags.writeable:
            value = value.copy()
            value.setflags(write=False)
        return value

    @property
    def n(self) -> int:
        return int(self.Omega.shape[0])

    @property
    def r(self) -> int:
        return int(self.U.shape[1])

    def psi_matrix(self) -> np.ndarray:
        """Dense 2n x 2n block-diagonal Psi."""
        return scipy.linalg.block_diag(*self.Psi)

    def reduced_matrix(self, v: np.ndarray) -> np.ndarray:
        """Dense diag(D) - U diag(v) Z^T; only meant for small checks."""
        v = np.asarray(v, dtype=float)
        return np.diag(self.D) - (self.U * v) @ self.Z.T
