"""
Deflation of a converged eigenvalue from a symmetric-form DPR1 matrix
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

from ..models.dpr1_models import Dpr1Csym
from .errors import PoleError


def deflate_arrays(d: np.ndarray, z: np.ndarray, lam: complex, s: int) -> Tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`deflate` used inside the iteration loop."""
    rest_d = np.delete(d, s)
    gap = rest_d - lam
    hits = np.flatnonzero(gap == 0)
    if hits.size:
        idx = int(hits[0])
        raise PoleError(lam, idx if idx < s else idx + 1)
    rest_z = np.delete(z, s) * np.sqrt((rest_d - d[s]) / gap)
    return rest_d, rest_z


def deflate(a: Dpr1Csym, lam: complex, s: int) -> Dpr1Csym:
    """Remove the eigenvalue lam and the diagonal entry d_s.

    The deflated matrix keeps the other diagonal entries and rescales
    z_i by sqrt((d_i - d_s) / (d_i - lam)); its secular function is
    (mu - d_s) f(mu) / (mu - lam), so its spectrum is that of ``a`` without lam.

    Args:
        a: Symmetric-form DPR1 matrix
        lam: Converged eigenvalue of ``a``
        s: Index of the diagonal entry removed with it

    Returns:
        The (m - 1)-dimensional deflated matrix

    Raises:
        PoleError: If lam equals one of the remaining diagonal entries
    """
    if not 0 <= s < a.m:
        raise IndexError(f"shift index {s} out of range for m={a.m}")
    d, z = deflate_arrays(a.d, a.z, lam, s)
    scaling = None if a.scaling is None else np.delete(a.scaling, s)
    active = None if a.active is None else np.delete(a.active, s)
    return Dpr1Csym(d=d, z=z, rho=a.rho, scaling=scaling, active=active)
