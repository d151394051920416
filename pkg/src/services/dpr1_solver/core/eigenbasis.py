"""
Right eigenvectors of DPR1 matrices held implicitly as Cauchy-like factors
"""
from __future__ import annotations

from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from ..models.dpr1_models import Dpr1, ExactPair
from .errors import DefectiveMatrixError


def _deflated_vector(d: np.ndarray, a: np.ndarray, b: np.ndarray, rho: float, i: int) -> np.ndarray:
    """Right eigenvector for d_i of D + rho a b^T when a_i = 0.

    With x_i = 1 the other entries are x_k = -rho a_k sigma / (d_k - d_i),
    where sigma = b^T x = b_i / (1 + rho sum_{k != i} a_k b_k / (d_k - d_i)).
    """
    m = d.shape[0]
    gap = d - d[i]
    gap[i] = 1.0
    coef = np.divide(a, gap, out=np.zeros(m, dtype=complex), where=gap != 0)
    coef[i] = 0.0
    denom = 1.0 + rho * np.dot(coef, b)
    x = np.zeros(m, dtype=complex)
    x[i] = 1.0
    if b[i] == 0 or denom == 0:
        return x
    sigma = b[i] / denom
    x -= rho * sigma * coef
    x[i] = 1.0
    return x


class Dpr1Eigenbasis:
    """Eigenvector matrix X of D + rho u z^T and its inverse, applied implicitly.

    Column k of X is the unit right eigenvector x_k = (D - lam_k I)^(-1) u / n_k.
    Row k of X^(-1) is y_k^T / (y_k^T x_k) with the left eigenvector
    y_k = (D - lam_k I)^(-1) z, so X^(-1) is never formed or factorized.
    Eigenvalues equal to a diagonal entry get explicit vectors instead.

    Args:
        a: Matrix whose eigenvalues are ``values``
        values: All m eigenvalues
        exact_pairs: Exact pairs reported by the conversion to symmetric form;
            their values must sit at the end of ``values`` in the same order
    """

    def __init__(self, a: Dpr1, values: np.ndarray, exact_pairs: Iterable[ExactPair] = ()):
        self.d = np.asarray(a.d)
        self.u = np.asarray(a.u)
        self.z = np.asarray(a.z)
        self.rho = a.rho
        self.values = np.asarray(values, dtype=complex)
        m = self.d.shape[0]
        if self.values.shape[0] != m:
            raise ValueError(f"expected {m} eigenvalues, got {self.values.shape[0]}")

        pairs = list(exact_pairs)
        first_exact = m - len(pairs)
        self._special: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        for offset, pair in enumerate(pairs):
            self._special[first_exact + offset] = self._pair_vectors(pair)
        on_pole = np.flatnonzero(np.isin(self.values, self.d))
        for k in on_pole:
            if int(k) not in self._special:
                i = int(np.flatnonzero(self.d == self.values[k])[0])
                e = np.zeros(m, dtype=complex)
                e[i] = 1.0
                self._special[int(k)] = (e, e.copy())

        self._general = np.array([k for k in range(m) if k not in self._special], dtype=np.intp)
        self._cauchy: Optional[np.ndarray] = None
        C = self._cauchy_matrix()
        self._xnorm = np.linalg.norm(C * self.u, axis=1)
        yx = (C * C) @ (self.z * self.u)
        if np.any(yx == 0):
            k = int(self._general[np.flatnonzero(yx == 0)[0]])
            raise DefectiveMatrixError(f"eigenvalue {self.values[k]} has orthogonal left and right eigenvectors")
        self._yscale = self._xnorm / yx

    def _pair_vectors(self, pair: ExactPair) -> Tuple[np.ndarray, np.ndarray]:
        m = self.d.shape[0]
        i = pair.index
        if pair.partner is not None:
            p = pair.partner
            x = np.zeros(m, dtype=complex)
            y = np.zeros(m, dtype=complex)
            x[i], x[p] = self.z[p], -self.z[i]
            y[i], y[p] = self.u[p], -self.u[i]
        elif self.z[i] == 0:
            x = np.zeros(m, dtype=complex)
            x[i] = 1.0
            y = _deflated_vector(self.d, self.z, self.u, self.rho, i)
        else:
            x = _deflated_vector(self.d, self.u, self.z, self.rho, i)
            y = np.zeros(m, dtype=complex)
            y[i] = 1.0
        x = x / np.linalg.norm(x)
        yx = np.dot(y, x)
        if yx == 0:
            raise DefectiveMatrixError(f"exact eigenvalue {pair.value} at index {i} is defective")
        return x, y / yx

    def _cauchy_matrix(self) -> np.ndarray:
        if self._cauchy is None:
            self._cauchy = 1.0 / (self.d[None, :] - self.values[self._general, None])
        return self._cauchy

    def release(self) -> None:
        """Drop the cached m x m Cauchy matrix; it is rebuilt on demand."""
        self._cauchy = None

    @property
    def m(self) -> int:
        return int(self.d.shape[0])

    def transform_factors(self, U: np.ndarray, Z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Return (X^(-1) U, X^T Z) for the trailing rank-one factors."""
        C = self._cauchy_matrix()
        g = self._general
        U_new = np.empty(U.shape, dtype=complex)
        Z_new = np.empty(Z.shape, dtype=complex)
        U_new[g] = ((C * self.z) @ U) * self._yscale[:, None]
        Z_new[g] = ((C * self.u) @ Z) / self._xnorm[:, None]
        for k, (x, y) in self._special.items():
            U_new[k] = y @ U
            Z_new[k] = x @ Z
        return U_new, Z_new

    def apply(self, W: np.ndarray) -> np.ndarray:
        """X @ W for a vector or a matrix of columns."""
        W = np.asarray(W, dtype=complex)
        single = W.ndim == 1
        if single:
            W = W[:, None]
        C = self._cauchy_matrix()
        g = self._general
        out = ((C * self.u) / self._xnorm[:, None]).T @ W[g]
        for k, (x, _) in self._special.items():
            out += np.outer(x, W[k])
        return out[:, 0] if single else out

    def right_matrix(self) -> np.ndarray:
        """Dense X with unit eigenvectors as columns."""
        X = np.empty((self.m, self.m), dtype=complex)
        C = self._cauchy_matrix()
        X[:, self._general] = ((C * self.u) / self._xnorm[:, None]).T
        for k, (x, _) in self._special.items():
            X[:, k] = x
        return X
