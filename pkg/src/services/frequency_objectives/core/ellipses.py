"""
Ellipse distance and semi-major-axis measures with their derivatives
"""
from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from ..models.objective_models import EllipseSpec


def upper_half(spectrum: np.ndarray) -> np.ndarray:
    """Indices of eigenvalues with Im >= 0, one representative per conjugate pair."""
    return np.flatnonzero(np.asarray(spectrum).imag >= 0.0)


def ellipse_distance(z: complex, E: EllipseSpec) -> float:
    """(Re(z-c))^2/a^2 + (Im(z-c))^2/b^2; 1 on the ellipse, below 1 inside."""
    if E.a is None:
        raise ValueError("ellipse_distance needs a fixed semi-major axis")
    w = complex(z) - E.center
    return (w.real / E.a) ** 2 + (w.imag / E.b) ** 2


def ellipse_distance_derivative(z: complex, dz: np.ndarray, E: EllipseSpec) -> np.ndarray:
    """Derivative of :func:`ellipse_distance` along directions dz (complex array)."""
    w = complex(z) - E.center
    dz = np.asarray(dz, dtype=complex)
    return 2.0 * (w.real * dz.real / E.a**2 + w.imag * dz.imag / E.b**2)


def spectrum_ellipse_distance(
    spectrum: np.ndarray, ellipses: Sequence[EllipseSpec]
) -> Tuple[float, Tuple[int, int]]:
    """Smallest ellipse distance over eigenvalues and ellipses.

    Returns:
        (value, (eigenvalue index, ellipse index)); ties go to the lowest pair

    Raises:
        ValueError: If either input is empty
    """
    spectrum = np.asarray(spectrum, dtype=complex)
    if spectrum.size == 0 or len(ellipses) == 0:
        raise ValueError("spectrum_ellipse_distance needs a nonempty spectrum and ellipse set")
    idx = upper_half(spectrum)
    if idx.size == 0:
        idx = np.arange(spectrum.shape[0])
    table = distance_table(spectrum[idx], ellipses)
    flat = int(np.argmin(table))
    i, j = divmod(flat, table.shape[1])
    return float(table[i, j]), (int(idx[i]), j)


def distance_table(values: np.ndarray, ellipses: Sequence[EllipseSpec]) -> np.ndarray:
    """Ellipse distances with eigenvalues along rows and ellipses along columns."""
    values = np.asarray(values, dtype=complex)
    table = np.empty((values.shape[0], len(ellipses)))
    for j, E in enumerate(ellipses):
        if E.a is None:
            raise ValueError(f"ellipse {j} needs a fixed semi-major axis")
        w = values - E.center
        table[:, j] = (w.real / E.a) ** 2 + (w.imag / E.b) ** 2
    return table


def semi_major(z: complex, E: EllipseSpec) -> float:
    """Largest semi-major axis keeping z out of the ellipse (~, b, c).

    +inf when Im z lies outside the open band (omega - b, omega + b),
    including its endpoints.
    """
    return float(semi_major_values(np.array([z]), E)[0])


def semi_major_values(values: np.ndarray, E: EllipseSpec) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    dy = values.imag - E.omega
    inside = np.abs(dy) < E.b
    out = np.full(values.shape, np.inf)
    root = np.sqrt(E.b**2 - dy[inside] ** 2)
    out[inside] = E.b * np.abs(values.real[inside] - E.eta) / root
    return out


def semi_major_derivative(z: complex, dz: np.ndarray, E: EllipseSpec) -> np.ndarray:
    """Derivative of :func:`semi_major` along dz; z must lie strictly inside the band."""
    z = complex(z)
    dz = np.asarray(dz, dtype=complex)
    dy = z.imag - E.omega
    q = E.b**2 - dy**2
    if q <= 0.0:
        raise ValueError(f"semi_major is infinite at z={z}, no derivative")
    dx = z.real - E.eta
    return E.b * np.sign(dx) * dz.real / np.sqrt(q) + E.b * abs(dx) * dy * dz.imag / q**1.5


def spectrum_semi_major(spectrum: np.ndarray, E: EllipseSpec) -> Tuple[float, Optional[int]]:
    """Smallest semi-major measure over the spectrum and the eigenvalue attaining it.

    The index is None when every eigenvalue avoids the band and the value is +inf.
    """
    spectrum = np.asarray(spectrum, dtype=complex)
    if spectrum.size == 0:
        raise ValueError("spectrum_semi_major needs a nonempty spectrum")
    idx = upper_half(spectrum)
    if idx.size == 0:
        idx = np.arange(spectrum.shape[0])
    vals = semi_major_values(spectrum[idx], E)
    k = int(np.argmin(vals))
    if not np.isfinite(vals[k]):
        return float("inf"), None
    return float(vals[k]), int(idx[k])
