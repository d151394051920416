"""
Fixed-end mass-spring chain with three viscous dampers
"""
from __future__ import annotations

import logging

import numpy as np

from ..models.system_models import MassProfile, MassProfileKind, OscillatorSpec, SystemMatrices
from ..utils.validation import validate_damper_indices

logger = logging.getLogger(__name__)


def mass_values(profile: MassProfile, n: int) -> np.ndarray:
    """Masses m_1..m_n for the requested profile."""
    if profile.kind == MassProfileKind.linear_ramp:
        if n == 1:
            return np.array([profile.lo])
        i = np.arange(n, dtype=float)
        return profile.lo + (profile.hi - profile.lo) * i / (n - 1)
    if profile.kind == MassProfileKind.tent:
        i = np.arange(1, n + 1)
        return (2 * n - np.minimum(i, n + 1 - i)) / 200.0
    values = np.asarray(profile.values, dtype=float)
    if values.shape != (n,):
        raise ValueError(f"explicit mass profile has {values.size} entries, expected {n}")
    return values


def build_oscillator(spec: OscillatorSpec, alpha: float) -> SystemMatrices:
    """Assemble M, K and G of the three-damper n-mass oscillator.

    The chain is fixed at both ends with n + 1 identical springs, so K is
    tridiagonal with 2k on the diagonal and -k beside it.

    Args:
        spec: Oscillator size, mass profile, stiffness and damper positions
        alpha: Internal damping coefficient

    Returns:
        SystemMatrices with G = [e_j, e_k - e_(k+1), e_l]

    Raises:
        ValueError: On out-of-range damper indices or nonpositive masses/stiffness
    """
    n = spec.n
    masses = mass_values(spec.mass_profile, n)
    if np.any(masses <= 0.0):
        raise ValueError("masses must be positive")
    k = float(spec.stiffness_value)
    if k <= 0.0:
        raise ValueError(f"stiffness must be positive, got {k}")

    j, kk, l = spec.resolved_indices()
    validate_damper_indices((j, kk, l), n)

    K = np.diag(np.full(n, 2.0 * k))
    if n > 1:
        off = np.full(n - 1, -k)
        K += np.diag(off, 1) + np.diag(off, -1)

    G = np.zeros((n, 3))
    G[j - 1, 0] = 1.0
    G[kk - 1, 1] = 1.0
    G[kk, 1] = -1.0
    G[l - 1, 2] = 1.0

    logger.debug(f"Built {n}-mass oscillator, dampers at {(j, kk, l)}, alpha={alpha}")
    return SystemMatrices(M=np.diag(masses), K=K, G=G, alpha=alpha)
