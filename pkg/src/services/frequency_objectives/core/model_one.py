"""
Model 1: spectral abscissa under fixed-ellipse constraints
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ...modal_precompute.models.modal_models import ModalForm
from ...qep_solver.core.service import QepSolverService
from ...system_model.models.system_models import SystemMatrices
from ...system_model.utils.validation import validate_viscosities
from ..models.objective_models import ModelConfig, ModelEvaluation, ModelKind
from .ellipses import distance_table, ellipse_distance_derivative, spectrum_ellipse_distance, upper_half
from .sensitivity import count_ties, rightmost
from .spectrum import eigen_gradients, solve_spectrum

logger = logging.getLogger(__name__)


def model1_eval(
    system: SystemMatrices,
    mf: ModalForm,
    config: ModelConfig,
    v: np.ndarray,
    solver: Optional[QepSolverService] = None,
) -> ModelEvaluation:
    """Minimize the spectral abscissa with every eigenvalue outside the fixed ellipses.

    Constraints, all in ``<= 0`` form:
    ``[1 - d(v)]`` (only with ellipses), ``sa(v) - tol_sa``, then ``-v_j``.

    Args:
        system: System matrices, used for eigenvector refinement and gradients
        mf: Modal form of ``system``
        config: Model 1 configuration with tol_sa set
        v: Viscosities
        solver: Warm-started solver to reuse across calls

    Returns:
        ModelEvaluation with objective mu0 * sa(v), constraints and their gradients

    Raises:
        ValueError: If the config is not Model 1 or tol_sa is unset
        SensitivityError: If an active eigenvalue is not simple
    """
    if config.kind != ModelKind.model1:
        raise ValueError(f"model1_eval got a {config.kind.value} config")
    tol_sa = config.require_tol_sa()
    vv = validate_viscosities(v, mf.r)
    ellipses = config.ellipses

    def wanted(values: np.ndarray):
        idx = {rightmost(values)[0]}
        if ellipses:
            idx.add(spectrum_ellipse_distance(values, ellipses)[1][0])
        return sorted(idx)

    solution, cint = solve_spectrum(system, mf, vv, wanted, solver)
    values = solution.values
    grads = eigen_gradients(system, vv, solution, cint)

    k_sa, nonsmooth = rightmost(values)
    sa = float(values[k_sa].real)
    sa_grad = grads[k_sa].real

    constraints = []
    rows = []
    distance = None
    if ellipses:
        distance, (i, j) = spectrum_ellipse_distance(values, ellipses)
        table = distance_table(values[upper_half(values)], ellipses)
        if count_ties(table.ravel(), distance) > 1:
            nonsmooth = True
        constraints.append(1.0 - distance)
        rows.append(-ellipse_distance_derivative(values[i], grads[i], ellipses[j]))
    constraints.append(sa - tol_sa)
    rows.append(sa_grad)
    constraints.extend(-vv)
    rows.extend(-np.eye(mf.r))

    if nonsmooth:
        logger.warning(f"Model 1 evaluated at a tie, v={vv.tolist()}")

    return ModelEvaluation(
        v=vv,
        objective=config.mu0 * sa,
        objective_grad=config.mu0 * sa_grad,
        constraints=np.asarray(constraints, dtype=float),
        constraint_grads=np.vstack(rows),
        spectral_abscissa=sa,
        distance=distance,
        nonsmooth=nonsmooth,
        spectrum=values,
    )
