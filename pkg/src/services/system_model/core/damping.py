"""
Damping matrices and QEP residuals
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from ..models.system_models import SystemMatrices
from ..utils.validation import validate_viscosities

if TYPE_CHECKING:
    from ...modal_precompute.models.modal_models import ModalForm

ArrayLike = Union[Sequence[float], np.ndarray]


def _sym_sqrt(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (A^(1/2), A^(-1/2)) of a symmetric positive definite matrix."""
    w, V = scipy.linalg.eigh(A)
    root = np.sqrt(w)
    return (V * root) @ V.T, (V / root) @ V.T


def critical_damping(system: SystemMatrices, modal: Optional["ModalForm"] = None) -> np.ndarray:
    """Internal damping C_int = alpha * M^(1/2) sqrt(M^(-1/2) K M^(-1/2)) M^(1/2).

    With a modal form at hand the same matrix is M Phi (alpha Omega) Phi^T M,
    because Phi^(-1) = Phi^T M.
    """
    if system.alpha == 0.0:
        return np.zeros_like(system.M)
    if modal is not None:
        MPhi = system.M @ modal.Phi
        C = (MPhi * (system.alpha * modal.Omega)) @ MPhi.T
    else:
        m_half, m_inv_half = _sym_sqrt(system.M)
        inner = m_inv_half @ system.K @ m_inv_half
        k_root, _ = _sym_sqrt(0.5 * (inner + inner.T))
        C = system.alpha * (m_half @ k_root @ m_half)
    return 0.5 * (C + C.T)


def assemble_damping(
    system: SystemMatrices,
    v: ArrayLike,
    modal: Optional["ModalForm"] = None,
    cint: Optional[np.ndarray] = None,
) -> np.ndarray:
    """C(v) = C_int + sum_j v_j g_j g_j^T.

    Args:
        system: System matrices
        v: Viscosities
        modal: Modal form, used to build C_int without matrix square roots
        cint: Internal damping the caller already holds

    Returns:
        Dense n x n damping matrix

    Raises:
        ValueError: If v or cint has the wrong shape
    """
    vv = validate_viscosities(v, system.r)
    if cint is None:
        cint = critical_damping(system, modal)
    elif cint.shape != system.M.shape:
        raise ValueError(f"cint has shape {cint.shape}, expected {system.M.shape}")
    return cint + (system.G * vv) @ system.G.T


def qep_residual(
    system: SystemMatrices,
    v: ArrayLike,
    lam: complex,
    x: np.ndarray,
    cint: Optional[np.ndarray] = None,
) -> float:
    """||(lam^2 M + lam C(v) + K) x||_2 / ||x||_2."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    norm_x = float(np.linalg.norm(x))
    if norm_x == 0.0:
        raise ValueError("eigenvector must be nonzero")
    C = assemble_damping(system, v, cint=cint)
    r = lam * lam * (system.M @ x) + lam * (C @ x) + system.K @ x
    return float(np.linalg.norm(r)) / norm_x


def qep_residuals(
    system: SystemMatrices,
    v: ArrayLike,
    values: np.ndarray,
    vectors: np.ndarray,
    cint: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Column-wise residuals for a batch of eigenpairs (vectors as columns)."""
    X = np.asarray(vectors, dtype=complex)
    lam = np.asarray(values, dtype=complex)
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("eigenvectors must be nonzero")
    C = assemble_damping(system, v, cint=cint)
    R = (system.M @ X) * lam**2 + (C @ X) * lam + system.K @ X
    return np.linalg.norm(R, axis=0) / norms
