"""
Simultaneous diagonalization of the mass and stiffness matrices
"""
from __future__ import annotations

import logging
from typing import Tuple

import numpy as np
import scipy.linalg

from ...system_model.models.system_models import SystemMatrices

logger = logging.getLogger(__name__)

# Relative gap below which two undamped frequencies count as repeated.
FREQUENCY_GAP_TOL = 1e-12


def simultaneous_diagonalize(system: SystemMatrices) -> Tuple[np.ndarray, np.ndarray]:
    """Find Phi with Phi^T M Phi = I and Phi^T K Phi = diag(Omega^2).

    Uses M = L L^T, the symmetric eigendecomposition of L^(-1) K L^(-T) and the
    back-transform Phi = L^(-T) Q. Columns are ordered by descending frequency
    and signed so that their largest-magnitude entry is positive.

    Args:
        system: Mass and stiffness matrices

    Returns:
        (Phi, Omega) with Omega strictly descending

    Raises:
        ValueError: If M or K is not positive definite or two frequencies coincide
    """
    try:
        L = scipy.linalg.cholesky(system.M, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"M is not positive definite: {exc}") from exc

    Kt = scipy.linalg.solve_triangular(L, system.K, lower=True)
    Kt = scipy.linalg.solve_triangular(L, Kt.T, lower=True)
    Kt = 0.5 * (Kt + Kt.T)
    w, Q = scipy.linalg.eigh(Kt)
    if w[0] <= 0.0:
        raise ValueError(f"K is not positive definite (smallest pencil eigenvalue {w[0]:.3e})")

    order = np.argsort(w)[::-1]
    w = w[order]
    Q = Q[:, order]
    Phi = scipy.linalg.solve_triangular(L.T, Q, lower=False)

    pivots = np.argmax(np.abs(Phi), axis=0)
    signs = np.sign(Phi[pivots, np.arange(Phi.shape[1])])
    signs[signs == 0] = 1.0
    Phi = Phi * signs

    Omega = np.sqrt(w)
    gaps = Omega[:-1] - Omega[1:]
    if gaps.size and np.min(gaps) <= FREQUENCY_GAP_TOL * Omega[0]:
        i = int(np.argmin(gaps))
        raise ValueError(
            f"undamped frequencies {i + 1} and {i + 2} coincide "
            f"({Omega[i]:.16e} vs {Omega[i + 1]:.16e}); repeated frequencies are not supported"
        )
    logger.debug(f"Diagonalized pencil of order {system.n}: omega in [{Omega[-1]:.4e}, {Omega[0]:.4e}]")
    return Phi, Omega
