"""
Exact-penalty BFGS for nonsmooth constrained problems
"""
from __future__ import annotations

import logging
from collections import deque

import numpy as np

from ..models.optimizer_models import IterateRecord, NlpProblem, OptResult, OptSense, OptStatus, SolverOptions
from .base import SolverStrategy
from .errors import NlpEvaluationError
from .evaluation import PenaltyPoint, evaluate_point
from .factory import SolverFactory
from .line_search import weak_wolfe
from .stationarity import stationarity_measure

logger = logging.getLogger(__name__)


def _better(a: PenaltyPoint, b: PenaltyPoint, viol_tol: float) -> bool:
    a_ok, b_ok = a.violation <= viol_tol, b.violation <= viol_tol
    if a_ok != b_ok:
        return a_ok
    if a_ok:
        return a.f < b.f
    return a.violation < b.violation


def bfgs_inverse_update(H: np.ndarray, s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """H+ = V H V^T + rho s s^T with V = I - rho s y^T and rho = 1 / s^T y."""
    rho = 1.0 / float(s @ y)
    V = np.eye(H.shape[0]) - rho * np.outer(s, y)
    H = V @ H @ V.T + rho * np.outer(s, s)
    return 0.5 * (H + H.T)


@SolverFactory.register
class PenaltyBfgsSolver(SolverStrategy):
    """BFGS on the exact penalty phi_mu(v) = mu f(v) + sum_i max(c_i(v), 0).

    mu is halved whenever the iterate is stationary for phi_mu but still
    infeasible, or the line search fails while constraints are violated.
    The curvature pair is skipped after a step that met only sufficient
    decrease, and the inverse Hessian is reset to the identity when the
    quasi-Newton direction stops being a descent direction.
    """

    @classmethod
    def solver_name(cls) -> str:
        return "penalty-bfgs"

    def solve(self, problem: NlpProblem, v_init: np.ndarray, opts: SolverOptions) -> OptResult:
        v0 = np.asarray(v_init, dtype=float).reshape(-1)
        if v0.shape[0] != problem.dimension:
            raise ValueError(f"starting point has length {v0.shape[0]}, expected {problem.dimension}")
        if not np.all(np.isfinite(v0)):
            raise ValueError(f"starting point must be finite, got {v0.tolist()}")

        evaluations = 0

        def evaluate(v: np.ndarray) -> PenaltyPoint:
            nonlocal evaluations
            evaluations += 1
            return evaluate_point(problem, v)

        current = evaluate(v0)
        if not current.finite:
            raise NlpEvaluationError(v0, ValueError("objective is not finite at the starting point"))

        n = problem.dimension
        mu = opts.penalty_init
        H = np.eye(n)
        fresh = True
        bundle = deque([current], maxlen=opts.bundle_size)
        best = current
        history = [IterateRecord(iteration=0, objective=current.f, violation=current.violation, step=0.0, penalty=mu)]
        status = OptStatus.max_iter
        message = "iteration limit reached"
        iteration = 0

        while iteration < opts.max_iter:
            stat = stationarity_measure(current, bundle, mu, opts.stat_radius)
            history[-1].stationarity = stat
            if stat <= opts.stat_tol:
                if current.violation <= opts.viol_tol:
                    status, message = OptStatus.converged, f"stationarity {stat:.2e} with feasible iterate"
                    break
                if 0.5 * mu < opts.penalty_min:
                    status = OptStatus.infeasible_stationary
                    message = f"stationary with violation {current.violation:.2e} at the smallest penalty"
                    break
                mu *= 0.5
                H, fresh = np.eye(n), True
                logger.debug(f"Stationary but infeasible, penalty weight now {mu:.3e}")
                continue

            grad = current.penalty_grad(mu)
            direction = -H @ grad
            if not float(direction @ grad) < 0.0:
                H, fresh = np.eye(n), True
                direction = -grad

            ls = weak_wolfe(
                evaluate,
                current,
                direction,
                mu,
                c1=opts.wolfe_c1,
                c2=opts.wolfe_c2,
                max_steps=opts.max_line_search,
            )
            if not ls.ok:
                if ls.last_trial is not None:
                    # a nearby trial across a kink can certify stationarity
                    bundle.append(ls.last_trial)
                    stat = stationarity_measure(current, bundle, mu, opts.stat_radius)
                    if stat <= opts.stat_tol and current.violation <= opts.viol_tol:
                        history[-1].stationarity = stat
                        status, message = OptStatus.converged, f"stationarity {stat:.2e} at a kink"
                        break
                if current.violation > opts.viol_tol and 0.5 * mu >= opts.penalty_min:
                    mu *= 0.5
                    H, fresh = np.eye(n), True
                    logger.debug(f"Line search failed while infeasible, penalty weight now {mu:.3e}")
                    continue
                if not fresh:
                    H, fresh = np.eye(n), True
                    continue
                status, message = OptStatus.line_search_failed, "no acceptable step along steepest descent"
                break

            iteration += 1
            new = ls.point
            s = new.v - current.v
            y = new.penalty_grad(mu) - grad
            sy = float(s @ y)
            if ls.wolfe and sy > 0.0:
                if fresh:
                    H = (sy / float(y @ y)) * np.eye(n)
                H = bfgs_inverse_update(H, s, y)
                fresh = False

            current = new
            bundle.append(new)
            if _better(new, best, opts.viol_tol):
                best = new
            history.append(
                IterateRecord(
                    iteration=iteration,
                    objective=new.f,
                    violation=new.violation,
                    step=ls.step * float(np.linalg.norm(direction)),
                    penalty=mu,
                )
            )
            logger.debug(f"Iteration {iteration}: f={new.f:.6e}, violation={new.violation:.2e}, t={ls.step:.2e}")

        final = evaluate(best.v)
        sign = -1.0 if problem.sense == OptSense.maximize else 1.0
        if sign < 0:
            for record in history:
                record.objective = -record.objective
        logger.info(
            f"{self.solver_name()} finished: {status.value} after {iteration} iterations, "
            f"{evaluations} evaluations, f={sign * final.f:.6e}, violation={final.violation:.2e}"
        )
        return OptResult(
            v_opt=final.v,
            objective_final=sign * final.f,
            constraint_violation=final.violation,
            iterations=iteration,
            evaluations=evaluations,
            history=history,
            status=status,
            message=message,
        )
