from __future__ import annotations

from typing import Any

import numpy as np


def frozen_array(value: Any, dtype: Any = None) -> np.ndarray:
    """Copy ``value`` into a contiguous array and mark it read-only."""
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def max_abs(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    return float(np.max(np.abs(values)))
