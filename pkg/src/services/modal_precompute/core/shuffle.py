from __future__ import annotations

import numpy as np


def perfect_shuffle(n: int) -> np.ndarray:
    """Index array p of length 2n with [x; y][p] = (x_1, y_1, x_2, y_2, ...)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    perm = np.empty(2 * n, dtype=np.intp)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n, 2 * n)
    return perm


def inverse_permutation(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.shape[0])
    return inv
