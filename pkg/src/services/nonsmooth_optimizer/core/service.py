"""
Multi-start optimization over registered solver strategies
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from ..models.optimizer_models import NlpProblem, OptResult, OptSense, OptStatus, SolverOptions
from . import penalty_bfgs  # noqa: F401  registers the built-in strategy
from .errors import NlpEvaluationError
from .factory import SolverFactory

logger = logging.getLogger(__name__)


def solve_nlp(problem: NlpProblem, v_init, opts: Optional[SolverOptions] = None) -> OptResult:
    """Run the configured solver strategy from one starting point.

    Raises:
        ValueError: If the solver name is unknown or v_init is malformed
        NlpEvaluationError: If the evaluators fail at the starting point
    """
    opts = opts or SolverOptions()
    solver = SolverFactory.create(opts.solver)
    return solver.solve(problem, np.asarray(v_init, dtype=float), opts)


def _failed(index: int, v0: np.ndarray, exc: NlpEvaluationError) -> OptResult:
    return OptResult(
        v_opt=np.asarray(v0, dtype=float),
        objective_final=math.nan,
        constraint_violation=math.inf,
        iterations=0,
        status=OptStatus.solver_error,
        message=str(exc),
        start_index=index,
    )


def select_best(results: Sequence[OptResult], sense: OptSense, viol_tol: float) -> OptResult:
    """Best objective among feasible results, else the least violating one marked infeasible."""
    feasible = [r for r in results if r.is_feasible(viol_tol)]
    if feasible:
        key = (lambda r: -r.objective_final) if sense == OptSense.maximize else (lambda r: r.objective_final)
        return min(feasible, key=key)
    candidates = [r for r in results if r.status != OptStatus.solver_error] or list(results)
    worst = min(candidates, key=lambda r: r.constraint_violation)
    if worst.status == OptStatus.solver_error:
        return worst
    return worst.model_copy(update={"status": OptStatus.infeasible_stationary})


def multi_start(problem: NlpProblem, starts: Sequence, opts: Optional[SolverOptions] = None) -> OptResult:
    """Solve from every start and keep the best result.

    Starts run on ``opts.workers`` threads, each with its own problem copy.
    A start whose evaluation fails is recorded as ``solver_error``; if every
    start fails the first error is raised.

    Args:
        problem: Objective and constraints; forked per worker
        starts: Starting points
        opts: Solver strategy, tolerances and worker count

    Returns:
        The best feasible result, or the least infeasible one

    Raises:
        ValueError: If ``starts`` is empty
        NlpEvaluationError: If no start could be evaluated
    """
    opts = opts or SolverOptions()
    starts = [np.asarray(s, dtype=float) for s in starts]
    if not starts:
        raise ValueError("multi_start needs at least one starting point")

    errors: List[NlpEvaluationError] = []

    def run(index: int, v0: np.ndarray, prob: NlpProblem) -> OptResult:
        try:
            result = solve_nlp(prob, v0, opts)
        except NlpEvaluationError as exc:
            logger.warning(f"Start {index} failed: {exc}")
            errors.append(exc)
            return _failed(index, v0, exc)
        result.start_index = index
        return result

    workers = min(opts.workers, len(starts))
    if workers == 1:
        results = [run(i, v0, problem) for i, v0 in enumerate(starts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run, i, v0, problem.worker_copy()) for i, v0 in enumerate(starts)]
            results = [f.result() for f in futures]

    if all(r.status == OptStatus.solver_error for r in results):
        raise errors[0]
    best = select_best(results, problem.sense, opts.viol_tol)
    logger.info(f"Best of {len(results)} starts: start {best.start_index}, status {best.status.value}")
    return best
