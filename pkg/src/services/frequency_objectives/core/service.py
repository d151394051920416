from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from ...modal_precompute.models.modal_models import ModalForm
from ...qep_solver.core.service import QepSolverService
from ...system_model.models.system_models import SystemMatrices
from ..models.objective_models import EllipseSpec, ModelConfig, ModelEvaluation, ModelKind
from .model_one import model1_eval
from .model_two import model2_eval
from .sensitivity import spectral_abscissa

logger = logging.getLogger(__name__)


class ObjectiveEvaluator:
    """Evaluates one model for one system, reusing the last evaluation at the same v.

    Objective and constraint callbacks at the same point share a single QEP
    solve. Instances are not thread-safe; use :meth:`fork` per worker.
    """

    def __init__(
        self,
        system: SystemMatrices,
        mf: ModalForm,
        config: ModelConfig,
        solver: Optional[QepSolverService] = None,
    ):
        self.system = system
        self.mf = mf
        self.config = config
        self.solver = solver or QepSolverService(system, mf)
        self._last: Optional[ModelEvaluation] = None
        self.evaluations = 0

    @property
    def maximize(self) -> bool:
        return self.config.kind == ModelKind.model2

    def fork(self) -> "ObjectiveEvaluator":
        return ObjectiveEvaluator(self.system, self.mf, self.config, solver=self.solver.fork())

    def with_tol_sa(self, tol_sa: float) -> "ObjectiveEvaluator":
        config = ModelConfig.model_validate({**self.config.model_dump(), "tol_sa": tol_sa})
        return ObjectiveEvaluator(self.system, self.mf, config, solver=self.solver)

    def evaluate(self, v) -> ModelEvaluation:
        vv = np.asarray(v, dtype=float).reshape(-1)
        if self._last is not None and np.array_equal(self._last.v, vv):
            return self._last
        if self.config.kind == ModelKind.model1:
            result = model1_eval(self.system, self.mf, self.config, vv, solver=self.solver)
        else:
            result = model2_eval(self.system, self.mf, self.config, vv, solver=self.solver)
        self.evaluations += 1
        self._last = result
        return result

    def objective(self, v) -> Tuple[float, np.ndarray]:
        ev = self.evaluate(v)
        return ev.objective, ev.objective_grad

    def constraints(self, v) -> Tuple[np.ndarray, np.ndarray]:
        ev = self.evaluate(v)
        return ev.constraints, ev.constraint_grads

    def spectrum(self, v) -> np.ndarray:
        """Eigenvalues only, without touching the evaluation cache."""
        return self.solver.solve(v, warm=False).values

    def spectral_abscissa(self, v) -> float:
        return spectral_abscissa(self.spectrum(v))

    def ellipse_geometry(self, v) -> List[EllipseSpec]:
        """Fixed ellipses for Model 1, or the maximized ones min(a_j(v), m_j) for Model 2."""
        if self.config.kind == ModelKind.model1:
            return list(self.config.ellipses)
        ev = self.evaluate(v)
        caps = self.config.resolved_caps()
        return [E.with_axis(float(min(a, cap))) for E, a, cap in zip(self.config.ellipses, ev.semi_axes or [], caps)]


def default_tol_sa(evaluator: ObjectiveEvaluator, v_init: np.ndarray, factor: float = 0.9) -> float:
    """factor * min(sa(v_init), sa(0)), the bound used when a config leaves tol_sa unset.

    Raises:
        ValueError: If neither configuration is asymptotically stable
    """
    sa_init = evaluator.spectral_abscissa(v_init)
    sa_zero = evaluator.spectral_abscissa(np.zeros(evaluator.mf.r))
    tol = factor * min(sa_init, sa_zero)
    logger.info(f"tol_sa = {tol:.6e} (sa(v_init)={sa_init:.6e}, sa(0)={sa_zero:.6e})")
    if tol >= 0.0:
        raise ValueError(f"cannot derive a negative tol_sa from sa(v_init)={sa_init} and sa(0)={sa_zero}")
    return tol
