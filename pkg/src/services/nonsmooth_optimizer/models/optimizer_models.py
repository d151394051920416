from __future__ import annotations

from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

ObjectiveFn = Callable[[np.ndarray], Tuple[float, np.ndarray]]
ConstraintFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


class OptSense(str, Enum):
    minimize = "minimize"
    maximize = "maximize"


class OptStatus(str, Enum):
    converged = "converged"
    max_iter = "max_iter"
    infeasible_stationary = "infeasible_stationary"
    solver_error = "solver_error"
    line_search_failed = "line_search_failed"


class NlpProblem(BaseModel):
    """min (or max) f(v) subject to c(v) <= 0.

    ``objective`` returns (f, grad f); ``constraints`` returns (c, J) with one
    row of J per constraint. ``fork`` hands each worker thread its own copy
    when the evaluators keep state.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    dimension: int = Field(..., gt=0)
    objective: ObjectiveFn
    constraints: Optional[ConstraintFn] = None
    sense: OptSense = OptSense.minimize
    fork: Optional[Callable[[], "NlpProblem"]] = None

    def worker_copy(self) -> "NlpProblem":
        return self.fork() if self.fork is not None else self


class SolverOptions(BaseModel):
    solver: str = Field(default="penalty-bfgs", description="Registered solver strategy name")
    max_iter: int = Field(default=100, gt=0)
    penalty_init: float = Field(default=1.0, gt=0, description="Initial weight mu on the objective")
    penalty_min: float = Field(default=1e-10, gt=0, description="Smallest mu before giving up on feasibility")
    stat_tol: float = Field(default=1e-6, gt=0)
    viol_tol: float = Field(default=1e-6, ge=0)
    stat_radius: float = Field(
        default=1e-6, gt=0, description="Cached gradients within this relative distance enter the stationarity test"
    )
    bundle_size: int = Field(default=20, gt=0, description="Number of cached gradients")
    wolfe_c1: float = Field(default=1e-4, gt=0, lt=1)
    wolfe_c2: float = Field(default=0.9, gt=0, lt=1)
    max_line_search: int = Field(default=40, gt=0)
    workers: int = Field(default=1, gt=0, description="Threads used by multi-start")


class IterateRecord(BaseModel):
    iteration: int
    objective: float
    violation: float
    step: float
    penalty: float
    stationarity: float = float("nan")


class OptResult(BaseModel):
    """Best point found; objective in the problem's own sense."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    v_opt: np.ndarray
    objective_final: float
    constraint_violation: float = Field(..., ge=0)
    iterations: int
    evaluations: int = 0
    history: List[IterateRecord] = Field(default_factory=list)
    status: OptStatus
    message: str = ""
    start_index: Optional[int] = None

    def is_feasible(self, viol_tol: float = 1e-6) -> bool:
        return self.status != OptStatus.solver_error and self.constraint_violation <= viol_tol

    def to_json_dict(self) -> dict:
        return {
            "v_opt": self.v_opt.tolist(),
            "objective_final": self.objective_final,
            "constraint_violation": self.constraint_violation,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "status": self.status.value,
            "message": self.message,
            "start_index": self.start_index,
        }
