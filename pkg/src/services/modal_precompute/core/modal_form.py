"""
Offline modal form: D, U, Z and the maps between QEP and reduced coordinates
"""
from __future__ import annotations

import logging
import time
from typing import Tuple

import numpy as np

from ...system_model.models.system_models import SystemMatrices
from ...system_model.utils.validation import validate_geometry
from ..models.modal_models import ModalForm
from .diagonalization import simultaneous_diagonalize
from .shuffle import perfect_shuffle

logger = logging.getLogger(__name__)


def block_eigensystem(omega: np.ndarray, alpha: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonalize every block D_i = [[0, w_i], [-w_i, -alpha w_i]].

    The roots of mu^2 + alpha w mu + w^2 = 0 are ordered with the positive
    imaginary part first (larger real part first when both are real). The
    eigenvector for mu is [w, mu], scaled so that psi^T psi = 1 whenever that
    is possible; for alpha = 0 the vector is isotropic and gets unit 2-norm.

    Returns:
        (mu, Psi, Psi_inv) with mu of shape (n, 2) and the blocks of shape (n, 2, 2)

    Raises:
        ValueError: If alpha == 2, where every block is defective
    """
    if alpha == 2.0:
        raise ValueError("alpha = 2 makes every 2x2 modal block defective")
    omega = np.asarray(omega, dtype=float)
    disc = np.sqrt(complex(alpha * alpha - 4.0))
    mu = np.empty((omega.shape[0], 2), dtype=complex)
    mu[:, 0] = omega * (-alpha + disc) / 2.0
    mu[:, 1] = omega * (-alpha - disc) / 2.0

    Psi = np.empty((omega.shape[0], 2, 2), dtype=complex)
    Psi[:, 0, :] = omega[:, None]
    Psi[:, 1, :] = mu
    if alpha > 0.0:
        scale = np.sqrt(omega[:, None] ** 2 + mu**2)
    else:
        scale = np.sqrt(omega[:, None] ** 2 + np.abs(mu) ** 2)
    Psi = Psi / scale[:, None, :]

    det = Psi[:, 0, 0] * Psi[:, 1, 1] - Psi[:, 0, 1] * Psi[:, 1, 0]
    if np.any(det == 0.0):
        raise ValueError("failed to diagonalize a 2x2 modal block")
    Psi_inv = np.empty_like(Psi)
    Psi_inv[:, 0, 0] = Psi[:, 1, 1] / det
    Psi_inv[:, 0, 1] = -Psi[:, 0, 1] / det
    Psi_inv[:, 1, 0] = -Psi[:, 1, 0] / det
    Psi_inv[:, 1, 1] = Psi[:, 0, 0] / det
    return mu, Psi, Psi_inv


def _low_rank_factors(
    Psi: np.ndarray, Psi_inv: np.ndarray, PhiTG: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    # The shuffled geometry has zeros in every even row and row i of Phi^T G
    # in odd row 2i + 1, so only the second column of each block matters.
    n, r = PhiTG.shape
    U = (Psi_inv[:, :, 1][:, :, None] * PhiTG[:, None, :]).reshape(2 * n, r)
    Z = (Psi[:, 1, :][:, :, None] * PhiTG[:, None, :]).reshape(2 * n, r)
    return U, Z


def build_modal_form(system: SystemMatrices) -> ModalForm:
    """Run the offline stage: modes, shuffle, block diagonalization and U, Z.

    Args:
        system: System whose viscosity-independent factors are wanted

    Returns:
        ModalForm such that eig(diag(D) - U diag(v) Z^T) is the QEP spectrum for any v

    Raises:
        ValueError: On non-definite matrices, repeated frequencies or alpha == 2
    """
    start = time.perf_counter()
    Phi, Omega = simultaneous_diagonalize(system)
    mu, Psi, Psi_inv = block_eigensystem(Omega, system.alpha)
    PhiTG = Phi.T @ system.G
    U, Z = _low_rank_factors(Psi, Psi_inv, PhiTG)
    mf = ModalForm(
        Phi=Phi,
        Omega=Omega,
        Psi=Psi,
        Psi_inv=Psi_inv,
        shuffle=perfect_shuffle(system.n),
        D=mu.reshape(-1),
        PhiTG=PhiTG,
        U=U,
        Z=Z,
        alpha=system.alpha,
    )
    logger.info(f"Offline stage for n={system.n} finished in {time.perf_counter() - start:.3f}s")
    return mf


def with_geometry(mf: ModalForm, G: np.ndarray) -> ModalForm:
    """Swap the damper geometry, reusing every other factor as-is."""
    G = np.asarray(G, dtype=float)
    if G.ndim == 1:
        G = G.reshape(-1, 1)
    validate_geometry(G, mf.n)
    PhiTG = mf.Phi.T @ G
    U, Z = _low_rank_factors(mf.Psi, mf.Psi_inv, PhiTG)
    return mf.model_copy(update={"PhiTG": _frozen(PhiTG), "U": _frozen(U), "Z": _frozen(Z)})


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def qep_to_modal(mf: ModalForm, M: np.ndarray, lam: complex, x: np.ndarray) -> np.ndarray:
    """Map a QEP vector x to the eigenvector coordinates of diag(D) - U V Z^T.

    Uses y = [Omega q; lam q] with q = Phi^T M x, the shuffle and Psi^(-1).
    """
    q = mf.Phi.T @ (M @ np.asarray(x, dtype=complex))
    top = mf.Omega * q
    bottom = lam * q
    w = np.empty((mf.n, 2), dtype=complex)
    w[:, 0] = mf.Psi_inv[:, 0, 0] * top + mf.Psi_inv[:, 0, 1] * bottom
    w[:, 1] = mf.Psi_inv[:, 1, 0] * top + mf.Psi_inv[:, 1, 1] * bottom
    return w.reshape(-1)


def modal_to_qep(mf: ModalForm, W: np.ndarray) -> np.ndarray:
    """Inverse of :func:`qep_to_modal` up to scaling: x = Phi Omega^(-1) (P Psi W)(1:n).

    Accepts a single vector or a matrix of column vectors.
    """
    W = np.asarray(W, dtype=complex)
    single = W.ndim == 1
    Wb = W.reshape(mf.n, 2, -1)
    top = mf.Psi[:, 0, 0][:, None] * Wb[:, 0, :] + mf.Psi[:, 0, 1][:, None] * Wb[:, 1, :]
    X = mf.Phi @ (top / mf.Omega[:, None])
    return X[:, 0] if single else X
