"""Inverse iteration and Rayleigh-functional polishing of QEP eigenpairs."""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ...modal_precompute.core.modal_form import modal_to_qep, qep_to_modal
from ...modal_precompute.models.modal_models import ModalForm
from ...system_model.core.damping import assemble_damping
from ...system_model.models.system_models import SystemMatrices
from ..models.qep_models import RefinementResult

logger = logging.getLogger(__name__)

MAX_STEPS = 3


def smw_solve(mf: ModalForm, v: np.ndarray, lam: complex, w: np.ndarray) -> np.ndarray:
    """Solve (diag(D) - lam I - U diag(v) Z^T) y = w with Sherman-Morrison-Woodbury.

    (Delta - U V Z^T)^(-1) = Delta^(-1) + Delta^(-1) U (I - V Z^T Delta^(-1) U)^(-1) V Z^T Delta^(-1),
    which holds for singular V as well.

    Raises:
        ZeroDivisionError: If lam equals an entry of D
        numpy.linalg.LinAlgError: If the r x r capacitance matrix is singular
    """
    delta = mf.D - lam
    if np.any(delta == 0):
        raise ZeroDivisionError(f"lambda={lam} equals an entry of D")
    Dw = w / delta
    DU = mf.U / delta[:, None]
    capacitance = np.eye(mf.r) - v[:, None] * (mf.Z.T @ DU)
    coeffs = np.linalg.solve(capacitance, v * (mf.Z.T @ Dw))
    return Dw + DU @ coeffs


def rayleigh_functional(M: np.ndarray, C: np.ndarray, K: np.ndarray, x: np.ndarray, near: complex) -> complex:
    """Root of x^T (mu^2 M + mu C + K) x = 0 closest to ``near``.

    The unconjugated form is used since M, C and K are real symmetric.
    """
    a = complex(x @ (M @ x))
    b = complex(x @ (C @ x))
    c = complex(x @ (K @ x))
    if a == 0:
        return complex(-c / b) if b != 0 else complex(near)
    root = np.sqrt(b * b - 4.0 * a * c)
    q = -0.5 * (b + root if abs(b + root) >= abs(b - root) else b - root)
    candidates = [q / a] + ([c / q] if q != 0 else [])
    return complex(min(candidates, key=lambda mu: abs(mu - near)))


def _residual(M: np.ndarray, C: np.ndarray, K: np.ndarray, lam: complex, x: np.ndarray) -> float:
    r = lam * lam * (M @ x) + lam * (C @ x) + K @ x
    return float(np.linalg.norm(r)) / float(np.linalg.norm(x))


def refine_eigenpair(
    system: SystemMatrices,
    mf: ModalForm,
    v: np.ndarray,
    lam: complex,
    x: np.ndarray,
    cint: Optional[np.ndarray] = None,
    steps: int = MAX_STEPS,
) -> RefinementResult:
    """Inverse iteration for an approximate QEP eigenpair, with eigenvalue polishing.

    Each step maps the vector to the reduced coordinates, solves against
    diag(D) - U diag(v) Z^T - lam I in O(n r) and maps it back, then
    replaces lam by the Rayleigh functional of the new vector. Vector and
    value are each kept only if the residual ||Q(lam) x|| / ||x|| does not
    grow; iteration stops at the first step that gains nothing.

    Args:
        system: System matrices used for the residual check
        mf: Modal form of ``system``
        v: Viscosities
        lam: Eigenvalue estimate
        x: Eigenvector estimate
        cint: Precomputed internal damping, if available
        steps: Most inverse-iteration steps to take

    Returns:
        RefinementResult with the chosen unit vector and eigenvalue; ``warning``
        is set when a solve was impossible and the last accepted pair was returned
    """
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=complex)
    x = x / np.linalg.norm(x)
    lam = complex(lam)
    M, K = system.M, system.K
    C = assemble_damping(system, v, cint=cint)
    before = _residual(M, C, K, lam, x)
    best = before
    warning = None
    taken = 0

    for _ in range(steps):
        try:
            w = smw_solve(mf, v, lam, qep_to_modal(mf, M, lam, x))
        except (ZeroDivisionError, np.linalg.LinAlgError) as exc:
            logger.warning(f"Refinement stopped for lambda={lam}: {exc}")
            warning = str(exc)
            break
        x_new = modal_to_qep(mf, w)
        norm = np.linalg.norm(x_new)
        if not np.isfinite(norm) or norm == 0.0:
            warning = "refined vector is not finite"
            break
        x_new = x_new / norm
        after = _residual(M, C, K, lam, x_new)
        gained = after <= best
        if gained:
            x, best = x_new, after
        mu = rayleigh_functional(M, C, K, x, lam)
        if np.isfinite(mu):
            polished = _residual(M, C, K, mu, x)
            if polished < best:
                lam, best, gained = mu, polished, True
        if not gained:
            break
        taken += 1

    return RefinementResult(
        vector=x,
        value=lam,
        residual_before=before,
        residual_after=best,
        improved=taken > 0,
        steps=taken,
        warning=warning,
    )
