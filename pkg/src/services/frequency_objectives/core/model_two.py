"""
Model 2: weighted semi-major-axis measures with a stability barrier
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from ...modal_precompute.models.modal_models import ModalForm
from ...qep_solver.core.service import QepSolverService
from ...system_model.models.system_models import SystemMatrices
from ...system_model.utils.validation import validate_viscosities
from ..models.objective_models import ModelConfig, ModelEvaluation, ModelKind
from .barrier import barrier, barrier_derivative
from .ellipses import semi_major_derivative, semi_major_values, spectrum_semi_major, upper_half
from .sensitivity import TIE_TOL, count_ties, rightmost
from .spectrum import eigen_gradients, solve_spectrum

logger = logging.getLogger(__name__)


def model2_eval(
    system: SystemMatrices,
    mf: ModalForm,
    config: ModelConfig,
    v: np.ndarray,
    solver: Optional[QepSolverService] = None,
) -> ModelEvaluation:
    """Weighted, capped semi-major-axis measures minus the stability barrier (to maximize).

    objective = mu0 * (sum_j phi_j min(a_j(v), m_j) - beta(sa(v); tol_sa, eta)).
    Once sa(v) >= eta the objective is -inf with a zero gradient.
    Constraints: ``sa(v) - tol_sa`` then ``-v_j``.

    Args:
        system: System matrices, used for eigenvector refinement and gradients
        mf: Modal form of ``system``
        config: Model 2 configuration with tol_sa set
        v: Viscosities
        solver: Warm-started solver to reuse across calls

    Returns:
        ModelEvaluation with the semi-axis measures before capping in ``semi_axes``

    Raises:
        ValueError: If the config is not Model 2 or tol_sa is unset
        SensitivityError: If an active eigenvalue is not simple
    """
    if config.kind != ModelKind.model2:
        raise ValueError(f"model2_eval got a {config.kind.value} config")
    tol_sa = config.require_tol_sa()
    spec = config.barrier()
    vv = validate_viscosities(v, mf.r)
    weights = config.resolved_weights()
    caps = config.resolved_caps()
    ellipses = config.ellipses

    def wanted(values: np.ndarray):
        idx = {rightmost(values)[0]}
        for E, cap in zip(ellipses, caps):
            a, k = spectrum_semi_major(values, E)
            if k is not None and a < cap:
                idx.add(k)
        return sorted(idx)

    solution, cint = solve_spectrum(system, mf, vv, wanted, solver)
    values = solution.values
    grads = eigen_gradients(system, vv, solution, cint)

    k_sa, nonsmooth = rightmost(values)
    sa = float(values[k_sa].real)
    sa_grad = grads[k_sa].real
    constraints = np.concatenate([[sa - tol_sa], -vv])
    constraint_grads = np.vstack([sa_grad, -np.eye(mf.r)])

    upper = values[upper_half(values)]
    semi_axes = []
    total = 0.0
    grad = np.zeros(mf.r)
    for E, phi, cap in zip(ellipses, weights, caps):
        a, k = spectrum_semi_major(values, E)
        semi_axes.append(a)
        if a >= cap:
            total += phi * cap
            if abs(a - cap) <= TIE_TOL * cap:
                nonsmooth = True
            continue
        total += phi * a
        grad += phi * semi_major_derivative(values[k], grads[k], E)
        if count_ties(semi_major_values(upper, E), a) > 1:
            nonsmooth = True

    beta = barrier(sa, spec)
    if math.isinf(beta):
        logger.warning(f"Spectral abscissa {sa:.3e} reached the barrier pole eta={config.eta}")
        return ModelEvaluation(
            v=vv,
            objective=-math.inf,
            objective_grad=np.zeros(mf.r),
            constraints=constraints,
            constraint_grads=constraint_grads,
            spectral_abscissa=sa,
            semi_axes=semi_axes,
            nonsmooth=True,
            spectrum=values,
        )
    total -= beta
    grad -= barrier_derivative(sa, sa_grad, spec)

    if nonsmooth:
        logger.warning(f"Model 2 evaluated at a tie, v={vv.tolist()}")

    return ModelEvaluation(
        v=vv,
        objective=config.mu0 * total,
        objective_grad=config.mu0 * grad,
        constraints=constraints,
        constraint_grads=constraint_grads,
        spectral_abscissa=sa,
        semi_axes=semi_axes,
        nonsmooth=nonsmooth,
        spectrum=values,
    )
