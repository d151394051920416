"""
Secular function of D + rho z z^T and its eigenvectors
"""
from __future__ import annotations

import numpy as np

from ..models.dpr1_models import Dpr1, Dpr1Csym
from .errors import PoleError


def _check_pole(d: np.ndarray, lam: complex) -> None:
    hits = np.flatnonzero(d == lam)
    if hits.size:
        raise PoleError(lam, int(hits[0]))


def secular_eval(a: Dpr1Csym, lam: complex) -> complex:
    """f(lam) = 1 + rho * sum_i z_i^2 / (d_i - lam); its zeros are the eigenvalues."""
    _check_pole(a.d, lam)
    return complex(1.0 + a.rho * np.sum(a.z * a.z / (a.d - lam)))


def secular_derivative(a: Dpr1Csym, lam: complex) -> complex:
    _check_pole(a.d, lam)
    t = a.z / (a.d - lam)
    return complex(a.rho * np.dot(t, t))


def eigenvector(a: Dpr1Csym, lam: complex) -> np.ndarray:
    """(D - lam I)^(-1) z scaled to unit 2-norm."""
    _check_pole(a.d, lam)
    x = a.z / (a.d - lam)
    return x / np.linalg.norm(x)


def right_vector(a: Dpr1, lam: complex) -> np.ndarray:
    """Unit right eigenvector (D - lam I)^(-1) u of D + rho u z^T.

    This equals S^(-1) times the symmetric-form vector (D - lam I)^(-1) S u,
    evaluated over every index so exact-deflated entries are included.
    """
    _check_pole(a.d, lam)
    x = a.u / (a.d - lam)
    return x / np.linalg.norm(x)
