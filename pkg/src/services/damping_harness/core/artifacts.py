from __future__ import annotations

import csv
import json
import logging
import threading
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import numpy as np
from pydantic import BaseModel

from ...frequency_objectives.models.objective_models import EllipseSpec

logger = logging.getLogger(__name__)

_write_lock = threading.Lock()

SPECTRUM_HEADER = ["re", "im"]
ELLIPSE_HEADER = ["index", "a", "b", "eta", "omega"]


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path = Path(path)
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    logger.info(f"Wrote {path}")
    return path


def write_spectrum_csv(path: Path, values: np.ndarray) -> Path:
    """Eigenvalues as (re, im) rows in the order given."""
    values = np.asarray(values, dtype=complex)
    return _write_rows(path, SPECTRUM_HEADER, ([repr(float(z.real)), repr(float(z.imag))] for z in values))


def write_ellipse_csv(path: Path, ellipses: Sequence[EllipseSpec]) -> Path:
    rows = (
        [j, repr(float(E.a)) if E.a is not None else "", repr(E.b), repr(E.eta), repr(E.omega)]
        for j, E in enumerate(ellipses)
    )
    return _write_rows(path, ELLIPSE_HEADER, rows)


def write_table_csv(path: Path, rows: List[BaseModel], header: Sequence[str]) -> Path:
    """Model rows as CSV; None becomes an empty cell."""

    def cell(value):
        if value is None:
            return ""
        if isinstance(value, float):
            return repr(value)
        return getattr(value, "value", value)

    return _write_rows(path, header, ([cell(getattr(row, name)) for name in header] for row in rows))


def write_json(path: Path, payload: Dict) -> Path:
    path = Path(path)
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, allow_nan=True))
    logger.info(f"Wrote {path}")
    return path
