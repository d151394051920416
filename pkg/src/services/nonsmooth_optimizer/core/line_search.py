"""
Weak Wolfe line search for nonsmooth objectives
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Optional

import numpy as np

from .errors import NlpEvaluationError
from .evaluation import PenaltyPoint

logger = logging.getLogger(__name__)


class LineSearchResult:
    __slots__ = ("ok", "wolfe", "step", "point", "evaluations", "last_trial")

    def __init__(
        self,
        ok: bool,
        wolfe: bool,
        step: float,
        point: Optional[PenaltyPoint],
        evaluations: int,
        last_trial: Optional[PenaltyPoint] = None,
    ):
        self.ok = ok
        self.wolfe = wolfe
        self.step = step
        self.point = point
        self.evaluations = evaluations
        self.last_trial = last_trial


def weak_wolfe(
    evaluate: Callable[[np.ndarray], PenaltyPoint],
    start: PenaltyPoint,
    direction: np.ndarray,
    mu: float,
    c1: float = 1e-4,
    c2: float = 0.9,
    max_steps: int = 40,
) -> LineSearchResult:
    """Bracketing/bisection search for the weak Wolfe conditions on phi_mu.

    Accepts t when phi(t) <= phi(0) + c1 t d0 and phi'(t) >= c2 d0, which
    tolerates kinks because only the sign side of the slope is tested.
    Trial points whose evaluation fails count as phi = +inf.
    If the Wolfe point is not found but some trial satisfied the sufficient
    decrease, that point is returned with ``wolfe=False``. A failed search
    still reports its last evaluated trial, the one closest to the start.

    Args:
        evaluate: Penalty function with gradient at a point
        start: Evaluated starting point
        direction: Search direction, a descent direction of phi_mu at ``start``
        mu: Objective weight of the penalty function
        c1: Sufficient decrease constant
        c2: Curvature constant
        max_steps: Most trial evaluations

    Returns:
        LineSearchResult with the accepted step and point
    """
    phi0 = start.penalty(mu)
    d0 = float(start.penalty_grad(mu) @ direction)
    lo, hi = 0.0, math.inf
    t = 1.0
    armijo_point: Optional[PenaltyPoint] = None
    armijo_step = 0.0
    evaluations = 0
    last_trial: Optional[PenaltyPoint] = None

    for _ in range(max_steps):
        try:
            trial = evaluate(start.v + t * direction)
        except NlpEvaluationError as exc:
            logger.debug(f"Line search trial t={t:.3e} failed: {exc}")
            trial = None
        evaluations += 1
        if trial is not None:
            last_trial = trial
        phi = trial.penalty(mu) if trial is not None else math.inf

        if not phi <= phi0 + c1 * t * d0:
            hi = t
        else:
            armijo_point, armijo_step = trial, t
            if float(trial.penalty_grad(mu) @ direction) < c2 * d0:
                lo = t
            else:
                return LineSearchResult(True, True, t, trial, evaluations)
        t = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * lo
        if math.isfinite(hi) and hi - lo <= 1e-16 * max(1.0, hi):
            break

    if armijo_point is not None:
        return LineSearchResult(True, False, armijo_step, armijo_point, evaluations)
    return LineSearchResult(False, False, 0.0, None, evaluations, last_trial=last_trial)
