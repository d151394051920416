"""
Spectral abscissa, tie detection and eigenvalue derivatives
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ...system_model.core.damping import critical_damping
from ...system_model.models.system_models import SystemMatrices
from ...system_model.utils.validation import validate_viscosities
from .ellipses import upper_half
from .errors import SensitivityError

# Relative gap below which two candidate extrema count as tied.
TIE_TOL = 1e-12


def spectral_abscissa(spectrum: np.ndarray) -> float:
    """Largest real part of the spectrum.

    Raises:
        ValueError: If the spectrum is empty
    """
    spectrum = np.asarray(spectrum, dtype=complex)
    if spectrum.size == 0:
        raise ValueError("spectral abscissa of an empty spectrum")
    return float(np.max(spectrum.real))


def rightmost(spectrum: np.ndarray) -> Tuple[int, bool]:
    """Index of the rightmost eigenvalue with Im >= 0, and whether another one ties it."""
    spectrum = np.asarray(spectrum, dtype=complex)
    idx = upper_half(spectrum)
    if idx.size == 0:
        idx = np.arange(spectrum.shape[0])
    re = spectrum.real[idx]
    k = int(np.argmax(re))
    return int(idx[k]), count_ties(re, re[k]) > 1


def count_ties(values: np.ndarray, best: float) -> int:
    """Number of entries within TIE_TOL (relative) of ``best``."""
    if not np.isfinite(best):
        return int(np.sum(values == best))
    return int(np.sum(np.abs(values - best) <= TIE_TOL * max(1.0, abs(best))))


def eigenvalue_gradient(
    system: SystemMatrices,
    v: np.ndarray,
    lam: complex,
    x: np.ndarray,
    cint: Optional[np.ndarray] = None,
) -> np.ndarray:
    """d lambda / d v_j = -lambda (g_j^T x)^2 / (x^T (2 lambda M + C(v)) x).

    The pencil is complex symmetric, so the right eigenvector doubles as the
    left one and the bilinear forms are unconjugated.

    Args:
        system: System matrices
        v: Viscosities
        lam: Simple eigenvalue
        x: Its eigenvector (any scaling)
        cint: Internal damping, computed when omitted

    Returns:
        Complex vector of length r

    Raises:
        SensitivityError: If the denominator vanishes
    """
    vv = validate_viscosities(v, system.r)
    x = np.asarray(x, dtype=complex).reshape(-1)
    if cint is None:
        cint = critical_damping(system)
    gx = system.G.T @ x
    Mx = system.M @ x
    Cx = cint @ x
    denom = 2.0 * lam * (x @ Mx) + x @ Cx + np.sum(vv * gx * gx)
    # same forms with conjugation bound the rounding error of denom
    scale = 2.0 * abs(lam) * np.vdot(x, Mx).real + abs(np.vdot(x, Cx)) + np.sum(np.abs(vv * gx * np.conj(gx)))
    if abs(denom) <= np.finfo(float).eps * max(scale, np.finfo(float).tiny):
        raise SensitivityError(lam, denom)
    return -lam * gx * gx / denom
