"""
Stability barrier used by Model 2
"""
from __future__ import annotations

import math

import numpy as np

from ..models.objective_models import BarrierSpec


def barrier(x: float, spec: BarrierSpec) -> float:
    """Zero up to y1, cubic on (y1, y], logarithmic on (y, y2), +inf from y2 on."""
    if x <= spec.y1:
        return 0.0
    if x <= spec.y:
        t = x - spec.y1
        return spec.tau1 * t**3 + spec.tau2 * t**2
    if x < spec.y2:
        return -math.log((spec.y2 - x) / (spec.y2 - spec.y)) + spec.h
    return math.inf


def barrier_derivative(x: float, f_prime, spec: BarrierSpec):
    """Chain-rule derivative of barrier(f) given f = x and f' = f_prime.

    ``f_prime`` may be a scalar or a gradient array; the result has its shape.

    Raises:
        ValueError: If x >= y2, where the barrier is infinite
    """
    f_prime = np.asarray(f_prime, dtype=float)
    if x >= spec.y2:
        raise ValueError(f"barrier derivative undefined at {x} >= {spec.y2}")
    if x <= spec.y1:
        scale = 0.0
    elif x <= spec.y:
        t = x - spec.y1
        scale = 3.0 * spec.tau1 * t**2 + 2.0 * spec.tau2 * t
    else:
        scale = 1.0 / (spec.y2 - x)
    out = scale * f_prime
    return float(out) if out.ndim == 0 else out
