"""
DPR1 eigensolver entry point
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..models.dpr1_models import Dpr1, Dpr1Options, EigenSet
from .conversion import drop_negligible, to_csym
from .eigenbasis import Dpr1Eigenbasis
from .mrqi import solve_values

logger = logging.getLogger(__name__)


def solve(a: Dpr1, opts: Optional[Dpr1Options] = None) -> EigenSet:
    """All eigenvalues, and optionally eigenvectors, of D + rho u z^T.

    The matrix is brought to complex symmetric form after splitting off exact
    pairs, its eigenvalues are found one at a time by MRQI with deflation, and
    eigenvectors are evaluated afterwards from the undeflated matrix.

    Args:
        a: DPR1 matrix with rho > 0
        opts: Tolerances, warm start and whether to return vectors

    Returns:
        EigenSet with iterated values first (in the order found) followed by
        the exact pairs; its ``warm_start`` seeds the next solve of a nearby matrix

    Raises:
        Dpr1ConvergenceError: If an eigenvalue cannot be found; carries the
            values accepted so far
    """
    opts = opts or Dpr1Options()
    cleaned = drop_negligible(a)
    csym, pairs = to_csym(cleaned)

    sweep = solve_values(csym, opts)
    values = sweep["values"]
    iterations = sweep["iterations"]
    n_iter = values.shape[0]
    exact_values = np.array([p.value for p in pairs], dtype=complex)
    all_values = np.concatenate([values, exact_values])
    exact = np.zeros(all_values.shape[0], dtype=bool)
    exact[n_iter:] = True

    vectors = None
    if opts.want_vectors:
        vectors = Dpr1Eigenbasis(cleaned, all_values, pairs).right_matrix()

    logger.debug(
        f"DPR1 solve m={a.m}: {len(pairs)} exact pairs, {int(np.sum(iterations))} inner iterations"
    )
    return EigenSet(
        values=all_values,
        vectors=vectors,
        shifts_used=np.concatenate([sweep["shifts"], exact_values]),
        iterations=np.concatenate([iterations, np.zeros(len(pairs), dtype=int)]),
        exact=exact,
        exact_pairs=pairs,
        matrix=cleaned,
        poles=sweep["poles"],
        pole_indices=sweep["indices"],
        couplings=sweep["couplings"],
    )
