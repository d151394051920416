"""
Dense reference eigensolvers and spectrum matching for validation
"""
from __future__ import annotations

from typing import Tuple, Union

import numpy as np
import scipy.linalg

from ...modal_precompute.models.modal_models import ModalForm
from ...system_model.core.damping import assemble_damping
from ...system_model.models.system_models import SystemMatrices

# Components smaller than this fraction of |reference| are compared absolutely.
ZERO_COMPONENT = 1e-13


def modal_linearization(mf: ModalForm, v: np.ndarray) -> np.ndarray:
    """Dense A(v) = [[0, Omega], [-Omega, -Phi^T C(v) Phi]] in modal coordinates."""
    v = np.asarray(v, dtype=float)
    n = mf.n
    A = np.zeros((2 * n, 2 * n))
    Om = np.diag(mf.Omega)
    A[:n, n:] = Om
    A[n:, :n] = -Om
    A[n:, n:] = -(mf.alpha * Om + (mf.PhiTG * v) @ mf.PhiTG.T)
    return A


def linearization_eigs(
    mf: ModalForm, v: np.ndarray, vectors: bool = False
) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """Eigenvalues (and right eigenvectors) of the dense modal linearization."""
    A = modal_linearization(mf, v)
    if vectors:
        return scipy.linalg.eig(A, right=True, check_finite=False)
    return scipy.linalg.eigvals(A, check_finite=False)


def companion_eigs(
    system: SystemMatrices, v: np.ndarray, vectors: bool = False
) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """QEP eigenvalues from the companion pencil ([[0, I], [-K, -C]], [[I, 0], [0, M]]).

    With ``vectors`` the top halves of the pencil eigenvectors are the QEP eigenvectors.
    """
    n = system.n
    C = assemble_damping(system, v)
    A = np.zeros((2 * n, 2 * n))
    B = np.eye(2 * n)
    A[:n, n:] = np.eye(n)
    A[n:, :n] = -system.K
    A[n:, n:] = -C
    B[n:, n:] = system.M
    if vectors:
        values, V = scipy.linalg.eig(A, B, right=True, check_finite=False)
        return values, V[:n]
    return scipy.linalg.eigvals(A, B, check_finite=False)


def greedy_match(computed: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Pair each computed eigenvalue, in order, with its nearest unused reference.

    Returns:
        Index array p such that computed[i] is matched with reference[p[i]]

    Raises:
        ValueError: If the two sets differ in size
    """
    computed = np.asarray(computed, dtype=complex)
    reference = np.asarray(reference, dtype=complex)
    if computed.shape != reference.shape:
        raise ValueError(f"cannot match {computed.shape[0]} eigenvalues against {reference.shape[0]}")
    used = np.zeros(reference.shape[0], dtype=bool)
    match = np.empty(computed.shape[0], dtype=np.intp)
    for i, value in enumerate(computed):
        dist = np.abs(reference - value)
        dist[used] = np.inf
        j = int(np.argmin(dist))
        match[i] = j
        used[j] = True
    return match


def componentwise_errors(computed: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """max(rel. error of real part, rel. error of imaginary part) per pair.

    A reference component that is zero to within ZERO_COMPONENT * |reference|
    is compared by absolute error instead.
    """
    c = np.asarray(computed, dtype=complex)
    r = np.asarray(reference, dtype=complex)
    floor = ZERO_COMPONENT * np.abs(r)

    def part(cp: np.ndarray, rp: np.ndarray) -> np.ndarray:
        diff = np.abs(cp - rp)
        denom = np.abs(rp)
        return np.where(denom > floor, diff / np.where(denom > floor, denom, 1.0), diff)

    return np.maximum(part(c.real, r.real), part(c.imag, r.imag))


def matched_errors(computed: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Greedy matching followed by :func:`componentwise_errors`."""
    match = greedy_match(computed, reference)
    return componentwise_errors(computed, np.asarray(reference)[match])
