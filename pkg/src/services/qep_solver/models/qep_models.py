from __future__ import annotations

from typing import Any, Callable, Dict, Iterable, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ...dpr1_solver.models.dpr1_models import Dpr1Options, WarmStart

IndexSelector = Union[None, Literal["all"], Iterable[int], Callable[[np.ndarray], Iterable[int]]]


class WarmCache(BaseModel):
    """Per-stage record of the previous solve, reused to start MRQI.

    ``stages[j]`` holds the eigenvalues of stage j in the order found, with
    the poles they were iterated from; None marks a skipped stage.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    stages: List[Optional[WarmStart]] = Field(default_factory=list)
    v: Optional[np.ndarray] = None

    def start_for(self, stage: int) -> Optional[WarmStart]:
        if stage < len(self.stages):
            return self.stages[stage]
        return None


class QepOptions(BaseModel):
    """Options for one online QEP solve.

    ``want_vector_indices`` selects eigenvectors by position in the sorted
    output: None, "all", explicit indices, or a callable receiving the
    sorted eigenvalues and returning indices.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    want_vector_indices: Any = None  # IndexSelector
    warm_cache: Optional[WarmCache] = None
    refine: bool = Field(default=True, description="Apply one inverse-iteration step to each requested vector")
    dpr1: Dpr1Options = Field(default_factory=lambda: Dpr1Options(want_vectors=False))


class QepSolution(BaseModel):
    """Spectrum of lambda^2 M + lambda C(v) + K sorted by descending imaginary part,
    ties by ascending real part."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    vectors: Dict[int, np.ndarray] = Field(default_factory=dict)
    residuals: Optional[Dict[int, float]] = None
    warm_cache: WarmCache = Field(default_factory=WarmCache)
    iterations: int = Field(default=0, description="Total inner MRQI iterations over all stages")
    stage_iterations: List[int] = Field(default_factory=list)
    refinement_warnings: List[int] = Field(default_factory=list)

    def conjugate_gap(self) -> float:
        """Largest distance from a conjugated eigenvalue to the spectrum."""
        vals = self.values
        if vals.size == 0:
            return 0.0
        dist = np.abs(np.conj(vals)[:, None] - vals[None, :])
        return float(np.max(np.min(dist, axis=1)))

    def to_rows(self) -> List[Dict[str, float]]:
        return [{"re": float(z.real), "im": float(z.imag)} for z in self.values]


class RefinementResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    vector: np.ndarray
    value: complex
    residual_before: float
    residual_after: float
    improved: bool
    steps: int = Field(default=0, description="Inverse-iteration steps that lowered the residual")
    warning: Optional[str] = None
