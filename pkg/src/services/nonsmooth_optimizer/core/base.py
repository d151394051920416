from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from ..models.optimizer_models import NlpProblem, OptResult, SolverOptions


class SolverStrategy(ABC):
    """Abstract base class for constrained nonsmooth solvers.

    Each backend inherits from this class, implements :meth:`solve` and
    registers itself with the SolverFactory under :meth:`solver_name`.
    """

    @abstractmethod
    def solve(self, problem: NlpProblem, v_init: np.ndarray, opts: SolverOptions) -> OptResult:
        """Run the solver from one starting point.

        Args:
            problem: Objective and constraint evaluators
            v_init: Finite starting point of length ``problem.dimension``
            opts: Tolerances and limits

        Returns:
            Result at the best point found
        """

    @classmethod
    @abstractmethod
    def solver_name(cls) -> str:
        """Registry key, matching SolverOptions.solver."""
