"""Modified Rayleigh quotient iteration for complex symmetric DPR1 matrices.

Each eigenvalue of D + rho z z^T is found relative to one diagonal entry
d_s (the pole), as d_s + gamma, and then deflated. For the iterate
x = z / (d - mu) the MRQI update (z^T x + rho (z^T x)^2) / x^T x is the
Newton step on F(mu) = 1 + 1 / (rho z^T x), whose zeros are the
eigenvalues and which equals 1 on every pole. The step size eta is
controlled by a sufficient decrease test on |F|.
"""
from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..models.dpr1_models import Dpr1Csym, Dpr1Options, WarmStart
from .deflation import deflate_arrays
from .errors import Dpr1ConvergenceError

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
# Merit below which an iterate counts as close to an eigenvalue rather than a pole.
NEAR_ROOT = 0.5
# A rejected step this many noise floors long is accepted as converged.
STALL_ACCEPT = 1e3


class ValueSweep:
    """Per-eigenvalue bookkeeping of one :func:`solve_values` call."""

    def __init__(self):
        self.values: List[complex] = []
        self.shifts: List[complex] = []
        self.iterations: List[int] = []
        self.poles: List[complex] = []
        self.indices: List[int] = []
        self.couplings: List[complex] = []

    def add(self, lam: complex, shift: complex, passes: int, pole: complex, index: int, coupling: complex) -> None:
        self.values.append(complex(lam))
        self.shifts.append(complex(shift))
        self.iterations.append(int(passes))
        self.poles.append(complex(pole))
        self.indices.append(int(index))
        self.couplings.append(complex(coupling))

    def arrays(self) -> dict:
        return {
            "values": np.array(self.values, dtype=complex),
            "shifts": np.array(self.shifts, dtype=complex),
            "iterations": np.array(self.iterations, dtype=int),
            "poles": np.array(self.poles, dtype=complex),
            "indices": np.array(self.indices, dtype=int),
            "couplings": np.array(self.couplings, dtype=complex),
        }


def _newton(dd: np.ndarray, z: np.ndarray, rho: float, gamma: complex, scale: float) -> Tuple[float, complex, float]:
    """Merit |F|, MRQI step and the rounding floor of that step at d_s + gamma.

    ``dd`` is d - d_s. Iterates that are nearly isotropic (x^T x close to 0)
    take the Hermitian Rayleigh quotient instead.
    """
    tiny = 8.0 * EPS * scale
    dh = dd - gamma
    hit = dh == 0
    if hit.any():
        dh = np.where(hit, tiny, dh)
    x = z / dh
    w = z * x
    zx = complex(np.sum(w))
    xx = complex(np.dot(x, x))
    merit = abs(1.0 + 1.0 / (rho * zx)) if zx != 0 else np.inf
    xnorm2 = float(np.vdot(x, x).real)
    if abs(xx) <= 1e-8 * xnorm2:
        step = (np.vdot(x, dh * x) + rho * np.vdot(x, z) * zx) / xnorm2
        return merit, complex(step), tiny
    step = zx * (1.0 + rho * zx) / xx
    noise = 8.0 * EPS * float(np.sum(np.abs(w))) / abs(xx)
    return merit, complex(step), noise


def _attempt(
    dd: np.ndarray,
    z: np.ndarray,
    rho: float,
    s: int,
    gamma0: complex,
    eta: float,
    opts: Dpr1Options,
    scale: float,
) -> Tuple[bool, complex, int]:
    """One damped MRQI run around the pole d_s, starting at offset ``gamma0``.

    ``gamma0 == 0`` is the canonical start x = e_s, whose first step
    rho z_s^2 is known without evaluation. A trial step gamma + eta * delta
    is accepted when it lowers |F| by the factor 1 - c * eta
    (c = ``opts.sufficient_decrease``); eta then doubles up to 1, otherwise
    it halves.

    Returns:
        (converged, final offset gamma, secular evaluations used)
    """
    tiny = 8.0 * EPS * scale
    if gamma0 == 0:
        gamma = 0j
        merit, step, noise = 1.0, complex(rho * z[s] * z[s]), 0.0
        passes = 0
    else:
        gamma = complex(gamma0)
        merit, step, noise = _newton(dd, z, rho, gamma, scale)
        passes = 1
        if not (np.isfinite(merit) and np.isfinite(step)):
            return False, gamma, passes

    while True:
        floor = max(opts.tol * abs(gamma), tiny, noise)
        if merit < NEAR_ROOT and abs(step) <= floor:
            return True, gamma + step, passes
        if passes >= opts.max_inner:
            return False, gamma, passes
        trial = gamma + eta * step
        t_merit, t_step, t_noise = _newton(dd, z, rho, trial, scale)
        passes += 1
        if np.isfinite(t_merit) and np.isfinite(t_step) and t_merit <= (1.0 - opts.sufficient_decrease * eta) * merit:
            gamma, merit, step, noise = trial, t_merit, t_step, t_noise
            eta = min(1.0, 2.0 * eta)
            continue
        if merit < NEAR_ROOT and abs(step) <= STALL_ACCEPT * floor:
            return True, gamma + step, passes
        eta *= 0.5
        if eta < opts.eta_min:
            return False, gamma, passes


def converge_eigenvalue(
    d: np.ndarray,
    z: np.ndarray,
    rho: float,
    opts: Dpr1Options,
    scale: float,
    warm: Optional[Tuple[int, complex]] = None,
) -> Tuple[complex, int, int, complex]:
    """Find one eigenvalue of diag(d) + rho z z^T.

    A warm start ``(s, gamma0)`` is tried once from d_s + gamma0. Cold
    attempts then visit the diagonal entries by decreasing magnitude (lowest
    index on ties), each from the canonical start, with the initial step
    size halved after every failed attempt.

    Args:
        d: Current diagonal
        z: Current rank-one factor
        rho: Positive rank-one weight
        opts: Tolerances and step control
        scale: max|d| + rho * sum|z|^2 of the undeflated matrix
        warm: Optional (pole index, offset from that pole) to start from

    Returns:
        (eigenvalue, secular evaluations over all attempts, pole index, starting shift)

    Raises:
        Dpr1ConvergenceError: Once the initial step size drops below ``opts.eta_min``
    """
    total = 0
    if warm is not None:
        s, gamma0 = warm
        ok, gamma, passes = _attempt(d - d[s], z, rho, s, gamma0, 1.0, opts, scale)
        total += passes
        if ok:
            return complex(d[s] + gamma), total, s, complex(d[s] + gamma0)
        logger.debug(f"Warm start at {complex(d[s] + gamma0)} failed after {passes} evaluations")

    order = np.argsort(-np.abs(d), kind="stable")
    eta = 1.0
    attempt = 0
    while True:
        s = int(order[attempt % order.size])
        ok, gamma, passes = _attempt(d - d[s], z, rho, s, 0j, eta, opts, scale)
        total += passes
        if ok:
            return complex(d[s] + gamma), total, s, complex(d[s])
        attempt += 1
        eta *= 0.5
        logger.debug(f"MRQI failed from pole {complex(d[s])}; initial step size now {eta:g}")
        if eta < opts.eta_min:
            raise Dpr1ConvergenceError(f"MRQI did not converge near shift {complex(d[s])} (eta={eta:g})", eta=eta)


def warm_point(d: np.ndarray, z: np.ndarray, rho: float, warm: Optional[WarmStart], step: int) -> Optional[Tuple[int, complex]]:
    """Starting pole and offset for deflation step ``step`` of a warm solve.

    With recorded poles the offset from the pole of the same index is
    rescaled by the change of its coupling rho z_s^2. Shifts alone start at
    the nearest diagonal entry.
    """
    if warm is None or step >= warm.shifts.shape[0]:
        return None
    sigma = complex(warm.shifts[step])
    if warm.indices is not None and warm.poles is not None and warm.couplings is not None:
        s = int(warm.indices[step])
        if s < d.size:
            ratio = rho * z[s] * z[s] / warm.couplings[step] if warm.couplings[step] != 0 else 1.0
            if not np.isfinite(ratio):
                ratio = 1.0
            return s, complex((sigma - warm.poles[step]) * ratio)
    s = int(np.argmin(np.abs(d - sigma)))
    return s, complex(sigma - d[s])


def solve_values(csym: Dpr1Csym, opts: Dpr1Options) -> dict:
    """All eigenvalues of a symmetric-form DPR1 matrix by MRQI plus deflation.

    Every accepted eigenvalue is deflated against its nearest diagonal entry.

    Returns:
        dict of arrays in the order found: ``values``, ``shifts`` (starting
        points), ``iterations``, ``poles`` with their ``indices`` in the
        deflated diagonal of each step, and ``couplings`` rho z_s^2

    Raises:
        Dpr1ConvergenceError: With the values accepted before the failing step
    """
    d = np.array(csym.d)
    z = np.array(csym.z)
    rho = csym.rho
    scale = (float(np.max(np.abs(d))) if d.size else 0.0) + rho * float(np.sum(np.abs(z) ** 2))
    warm = opts.resolved_warm_start()

    sweep = ValueSweep()
    step = 0
    while d.size:
        if d.size == 1:
            coupling = rho * z[0] * z[0]
            sweep.add(d[0] + coupling, d[0], 0, d[0], 0, coupling)
            break
        try:
            lam, passes, s, shift = converge_eigenvalue(d, z, rho, opts, scale, warm_point(d, z, rho, warm, step))
        except Dpr1ConvergenceError as exc:
            raise Dpr1ConvergenceError(
                str(exc), partial_values=np.array(sweep.values, dtype=complex), failed_step=step, eta=exc.eta
            ) from exc
        sweep.add(lam, shift, passes, d[s], s, rho * z[s] * z[s])
        nearest = int(np.argmin(np.abs(d - lam)))
        d, z = deflate_arrays(d, z, lam, nearest)
        step += 1

    return sweep.arrays()
