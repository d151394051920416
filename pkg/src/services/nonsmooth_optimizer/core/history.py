from __future__ import annotations

import csv
from pathlib import Path

from ..models.optimizer_models import OptResult

HISTORY_HEADER = ["iteration", "objective", "violation", "step", "penalty", "stationarity"]


def write_history_csv(result: OptResult, path: Path) -> Path:
    """One row per accepted iterate; row 0 is the starting point."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HISTORY_HEADER)
        for rec in result.history:
            writer.writerow(
                [rec.iteration, repr(rec.objective), repr(rec.violation), repr(rec.step), repr(rec.penalty), repr(rec.stationarity)]
            )
    return path
