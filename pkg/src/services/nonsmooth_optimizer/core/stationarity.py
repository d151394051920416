from __future__ import annotations

from typing import Iterable

import numpy as np
import scipy.optimize

from .evaluation import PenaltyPoint


def min_norm_convex(gradients: np.ndarray) -> np.ndarray:
    """Smallest-norm point of the convex hull of the rows of ``gradients``.

    Solved as nonnegative least squares with an extra heavily weighted row
    forcing the weights to sum to one.
    """
    G = np.atleast_2d(np.asarray(gradients, dtype=float))
    if G.shape[0] == 1:
        return G[0].copy()
    weight = max(1.0, float(np.max(np.abs(G)))) * 1e3
    A = np.vstack([G.T, np.full((1, G.shape[0]), weight)])
    b = np.zeros(A.shape[0])
    b[-1] = weight
    lam, _ = scipy.optimize.nnls(A, b)
    total = lam.sum()
    if total <= 0.0:
        k = int(np.argmin(np.linalg.norm(G, axis=1)))
        return G[k].copy()
    return (lam / total) @ G


def stationarity_measure(current: PenaltyPoint, bundle: Iterable[PenaltyPoint], mu: float, radius: float) -> float:
    """Norm of the min-norm convex combination of penalty gradients near ``current``.

    Every cached point within ``radius * max(1, |v|)`` of the current iterate
    contributes its penalty gradient at the present mu.
    """
    reach = radius * max(1.0, float(np.linalg.norm(current.v)))
    rows = [current.penalty_grad(mu)]
    for pt in bundle:
        if pt is current or not pt.finite:
            continue
        if np.linalg.norm(pt.v - current.v) <= reach:
            rows.append(pt.penalty_grad(mu))
    return float(np.linalg.norm(min_norm_convex(np.vstack(rows))))
