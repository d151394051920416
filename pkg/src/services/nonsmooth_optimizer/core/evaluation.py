from __future__ import annotations

import math

import numpy as np

from ..models.optimizer_models import NlpProblem, OptSense
from .errors import NlpEvaluationError


class PenaltyPoint:
    """One evaluation of f, grad f, c and J in minimization form.

    phi_mu(v) = mu f(v) + sum_i max(c_i(v), 0).
    """

    __slots__ = ("v", "f", "g", "c", "J")

    def __init__(self, v: np.ndarray, f: float, g: np.ndarray, c: np.ndarray, J: np.ndarray):
        self.v = v
        self.f = f
        self.g = g
        self.c = c
        self.J = J

    @property
    def violation(self) -> float:
        return float(max(0.0, np.max(self.c))) if self.c.size else 0.0

    @property
    def finite(self) -> bool:
        return math.isfinite(self.f)

    def penalty(self, mu: float) -> float:
        if not self.finite:
            return math.inf
        return mu * self.f + float(np.sum(np.maximum(self.c, 0.0)))

    def penalty_grad(self, mu: float) -> np.ndarray:
        grad = mu * self.g
        active = self.c > 0.0
        if np.any(active):
            grad = grad + self.J[active].sum(axis=0)
        return grad


def evaluate_point(problem: NlpProblem, v: np.ndarray) -> PenaltyPoint:
    """Evaluate the problem at v, negating the objective for maximization.

    Raises:
        NlpEvaluationError: If an evaluator raises or returns malformed output
    """
    v = np.array(v, dtype=float)
    try:
        f, g = problem.objective(v)
        g = np.asarray(g, dtype=float).reshape(-1)
        if problem.constraints is not None:
            c, J = problem.constraints(v)
            c = np.asarray(c, dtype=float).reshape(-1)
            J = np.asarray(J, dtype=float).reshape(c.shape[0], problem.dimension)
        else:
            c = np.empty(0)
            J = np.empty((0, problem.dimension))
    except Exception as exc:
        raise NlpEvaluationError(v, exc) from exc
    if g.shape[0] != problem.dimension:
        raise NlpEvaluationError(v, ValueError(f"gradient has length {g.shape[0]}, expected {problem.dimension}"))
    f = float(f)
    if problem.sense == OptSense.maximize:
        f, g = -f, -g
    return PenaltyPoint(v, f, g, c, J)
