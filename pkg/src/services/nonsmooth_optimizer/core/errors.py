from __future__ import annotations

import numpy as np


class NlpEvaluationError(RuntimeError):
    """An objective or constraint evaluator raised; ``v`` is the offending point."""

    def __init__(self, v: np.ndarray, cause: BaseException):
        super().__init__(f"evaluation failed at v={np.asarray(v).tolist()}: {cause}")
        self.v = np.array(v, dtype=float)
        self.cause = cause
