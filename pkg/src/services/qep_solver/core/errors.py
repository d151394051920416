from __future__ import annotations


class QepStageError(RuntimeError):
    """A rank-one peeling stage failed; ``stage`` is the 0-based damper index."""

    def __init__(self, stage: int, cause: BaseException):
        super().__init__(f"stage {stage + 1} failed: {cause}")
        self.stage = stage
        self.cause = cause
