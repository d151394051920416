"""
Validation utilities for system matrices and viscosity vectors
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np
import scipy.linalg


def validate_spd(name: str, matrix: np.ndarray) -> None:
    """
    Check that a matrix is square, symmetric and positive definite

    Args:
        name: Matrix name used in error messages
        matrix: Candidate matrix

    Raises:
        ValueError: If the matrix is not square, not symmetric or the Cholesky
            factorization fails
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} must be square, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12 * scale):
        raise ValueError(f"{name} must be symmetric")
    try:
        scipy.linalg.cholesky(matrix, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ValueError(f"{name} is not positive definite: {exc}") from exc


def validate_geometry(G: np.ndarray, n: int) -> None:
    """
    Check the damper geometry matrix

    Raises:
        ValueError: If G has the wrong row count, more columns than rows or an
            all-zero column
    """
    if G.shape[0] != n:
        raise ValueError(f"G must have {n} rows, got {G.shape[0]}")
    if G.shape[1] > n:
        raise ValueError(f"G has {G.shape[1]} columns but the system has only {n} degrees of freedom")
    zero_cols = np.flatnonzero(~np.any(G != 0.0, axis=0))
    if zero_cols.size:
        raise ValueError(f"G has all-zero columns at positions {zero_cols.tolist()}")


def validate_viscosities(v: Union[Sequence[float], np.ndarray], r: int) -> np.ndarray:
    """
    Coerce a viscosity vector to a float array of length r

    Raises:
        ValueError: If the length does not match or entries are not finite
    """
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape[0] != r:
        raise ValueError(f"expected {r} viscosities, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"viscosities must be finite, got {arr.tolist()}")
    return arr


def validate_damper_indices(indices: Sequence[int], n: int) -> None:
    """
    Check the (j, k, l) damper positions of the n-mass oscillator

    Raises:
        ValueError: If an index is out of range or positions coincide
    """
    j, k, l = (int(i) for i in indices)
    for label, idx in (("j", j), ("k", k), ("l", l)):
        if idx < 1 or idx > n:
            raise ValueError(f"damper index {label}={idx} out of range 1..{n}")
    if k + 1 > n:
        raise ValueError(f"damper index k={k} needs k+1 <= n={n}")
    if len({j, k, l}) != 3:
        raise ValueError(f"damper indices must be distinct, got {(j, k, l)}")
