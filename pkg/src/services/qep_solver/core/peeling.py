"""
Rank-one peeling of the damper terms off the modal diagonal
"""
from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from ...dpr1_solver.core.eigenbasis import Dpr1Eigenbasis
from ...dpr1_solver.core.errors import DefectiveMatrixError, Dpr1ConvergenceError
from ...dpr1_solver.core.service import solve as solve_dpr1
from ...dpr1_solver.models.dpr1_models import Dpr1, Dpr1Options, WarmStart
from ...modal_precompute.models.modal_models import ModalForm
from ..models.qep_models import WarmCache
from .errors import QepStageError

logger = logging.getLogger(__name__)


class PeelResult:
    """Outcome of peeling every rank-one damper term off diag(D).

    ``bases[j]`` is the eigenbasis xi_j of stage j (None for skipped stages),
    so the eigenvector matrix of the reduced problem is xi_1 xi_2 ... xi_r.
    """

    def __init__(
        self,
        values: np.ndarray,
        bases: List[Optional[Dpr1Eigenbasis]],
        stage_iterations: List[int],
        warm_cache: WarmCache,
    ):
        self.values = values
        self.bases = bases
        self.stage_iterations = stage_iterations
        self.warm_cache = warm_cache

    def eigenvectors(self, positions: np.ndarray) -> np.ndarray:
        """Columns xi_1 ... xi_r e_k for the given positions of ``values``."""
        m = self.values.shape[0]
        W = np.zeros((m, positions.shape[0]), dtype=complex)
        W[positions, np.arange(positions.shape[0])] = 1.0
        for basis in reversed(self.bases):
            if basis is not None:
                W = basis.apply(W)
        return W


def peel_stages(
    mf: ModalForm,
    v: np.ndarray,
    opts: Dpr1Options,
    warm: Optional[WarmCache] = None,
) -> PeelResult:
    """Diagonalize diag(D) - U diag(v) Z^T one damper at a time.

    Stage j solves the DPR1 problem L_(j-1) + |v_j| (-sgn(v_j) u_j) z_j^T,
    then maps the remaining factors with U <- xi_j^(-1) U and Z <- xi_j^T Z.
    Stages with v_j = 0 leave L unchanged.

    Args:
        mf: Offline-stage factors
        v: Viscosities, one stage each
        opts: DPR1 tolerances shared by every stage
        warm: Previous solve whose per-stage record starts MRQI

    Returns:
        PeelResult with the final diagonal, stage eigenbases and a new warm cache

    Raises:
        QepStageError: If a stage does not converge or is defective
    """
    L = np.array(mf.D, dtype=complex)
    U = np.array(mf.U, dtype=complex)
    Z = np.array(mf.Z, dtype=complex)
    bases: List[Optional[Dpr1Eigenbasis]] = []
    stage_iterations: List[int] = []
    starts: List[Optional[WarmStart]] = []

    for j, vj in enumerate(np.asarray(v, dtype=float)):
        if vj == 0.0:
            bases.append(None)
            stage_iterations.append(0)
            starts.append(None)
            continue
        stage = Dpr1(d=L, u=-np.sign(vj) * U[:, j], z=Z[:, j], rho=abs(vj))
        stage_opts = opts.model_copy(
            update={"warm_start": warm.start_for(j) if warm is not None else None, "want_vectors": False}
        )
        try:
            eig = solve_dpr1(stage, stage_opts)
            basis = Dpr1Eigenbasis(eig.matrix, eig.values, eig.exact_pairs)
        except (Dpr1ConvergenceError, DefectiveMatrixError) as exc:
            raise QepStageError(j, exc) from exc

        if j + 1 < U.shape[1]:
            U[:, j + 1 :], Z[:, j + 1 :] = basis.transform_factors(U[:, j + 1 :], Z[:, j + 1 :])
        basis.release()
        L = eig.values
        bases.append(basis)
        stage_iterations.append(eig.total_iterations)
        starts.append(eig.warm_start)
        logger.debug(f"Stage {j + 1}: v={vj:.6g}, {eig.total_iterations} inner iterations")

    return PeelResult(
        values=L,
        bases=bases,
        stage_iterations=stage_iterations,
        warm_cache=WarmCache(stages=starts, v=np.array(v, dtype=float)),
    )
