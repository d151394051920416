"""
Online QEP eigensolver and its warm-started service wrapper
"""
from __future__ import annotations

import logging
import threading
from typing import Iterable, Optional

import numpy as np

from ...modal_precompute.core.modal_form import modal_to_qep
from ...modal_precompute.models.modal_models import ModalForm
from ...system_model.core.damping import critical_damping, qep_residuals
from ...system_model.models.system_models import SystemMatrices
from ...system_model.utils.validation import validate_viscosities
from ..models.qep_models import QepOptions, QepSolution, WarmCache
from .peeling import peel_stages
from .refinement import refine_eigenpair

logger = logging.getLogger(__name__)


def sort_order(values: np.ndarray) -> np.ndarray:
    """Descending imaginary part, ties by ascending real part."""
    return np.lexsort((values.real, -values.imag))


def _resolve_indices(selector, values: np.ndarray) -> np.ndarray:
    if selector is None:
        return np.empty(0, dtype=np.intp)
    if isinstance(selector, str):
        if selector != "all":
            raise ValueError(f"unknown vector selector {selector!r}")
        return np.arange(values.shape[0])
    if callable(selector):
        selector = selector(values)
    idx = np.unique(np.fromiter((int(i) for i in selector), dtype=np.intp))
    if idx.size and (idx[0] < 0 or idx[-1] >= values.shape[0]):
        raise ValueError(f"eigenvector indices must lie in 0..{values.shape[0] - 1}")
    return idx


def solve_qep(
    mf: ModalForm,
    v: Iterable[float],
    opts: Optional[QepOptions] = None,
    system: Optional[SystemMatrices] = None,
    cint: Optional[np.ndarray] = None,
) -> QepSolution:
    """Online QEP solve: peel the r damper terms, then build requested eigenvectors.

    Args:
        mf: Offline-stage factors
        v: Viscosities, one per damper
        opts: Vector selection, warm cache and DPR1 tolerances
        system: Needed for refinement and residuals of requested vectors
        cint: Internal damping of ``system``, computed when omitted

    Returns:
        QepSolution with sorted eigenvalues and a warm cache for the next call

    Raises:
        ValueError: If v has the wrong length
        QepStageError: If a DPR1 stage fails
    """
    opts = opts or QepOptions()
    vv = validate_viscosities(list(v), mf.r)
    peel = peel_stages(mf, vv, opts.dpr1, opts.warm_cache)

    order = sort_order(peel.values)
    values = peel.values[order]
    wanted = _resolve_indices(opts.want_vector_indices, values)

    vectors = {}
    residuals = None
    warnings = []
    if wanted.size:
        X = modal_to_qep(mf, peel.eigenvectors(order[wanted]))
        X = X / np.linalg.norm(X, axis=0)
        if system is not None:
            if cint is None:
                cint = critical_damping(system, mf)
            if opts.refine:
                for col, k in enumerate(wanted):
                    res = refine_eigenpair(system, mf, vv, values[k], X[:, col], cint=cint)
                    X[:, col] = res.vector
                    values[k] = res.value
                    if res.warning is not None:
                        warnings.append(int(k))
            res_all = qep_residuals(system, vv, values[wanted], X, cint=cint)
            residuals = {int(k): float(r) for k, r in zip(wanted, res_all)}
        vectors = {int(k): X[:, col].copy() for col, k in enumerate(wanted)}

    return QepSolution(
        values=values,
        vectors=vectors,
        residuals=residuals,
        warm_cache=peel.warm_cache,
        iterations=int(sum(peel.stage_iterations)),
        stage_iterations=peel.stage_iterations,
        refinement_warnings=warnings,
    )


class QepSolverService:
    """Online solver bound to one system, carrying the warm cache between calls.

    Each instance is meant for one thread; :meth:`fork` gives an independent
    copy sharing the read-only modal form.
    """

    def __init__(self, system: SystemMatrices, mf: ModalForm, opts: Optional[QepOptions] = None):
        self.system = system
        self.mf = mf
        self.opts = opts or QepOptions()
        self.cint = critical_damping(system, mf)
        self._warm: Optional[WarmCache] = None
        self._lock = threading.Lock()

    def fork(self) -> "QepSolverService":
        clone = QepSolverService.__new__(QepSolverService)
        clone.system = self.system
        clone.mf = self.mf
        clone.opts = self.opts
        clone.cint = self.cint
        clone._warm = None
        clone._lock = threading.Lock()
        return clone

    def reset(self) -> None:
        self._warm = None

    def solve(self, v: Iterable[float], want=None, warm: bool = True) -> QepSolution:
        with self._lock:
            opts = self.opts.model_copy(
                update={"want_vector_indices": want, "warm_cache": self._warm if warm else None}
            )
            solution = solve_qep(self.mf, v, opts, system=self.system, cint=self.cint)
            self._warm = solution.warm_cache
            return solution
