from __future__ import annotations

from typing import Dict, Optional, Tuple

import numpy as np

from ...modal_precompute.models.modal_models import ModalForm
from ...qep_solver.core.service import QepSolverService, solve_qep
from ...qep_solver.models.qep_models import QepOptions, QepSolution
from ...system_model.core.damping import critical_damping
from ...system_model.models.system_models import SystemMatrices
from .sensitivity import eigenvalue_gradient


def solve_spectrum(
    system: SystemMatrices,
    mf: ModalForm,
    v: np.ndarray,
    want,
    solver: Optional[QepSolverService] = None,
) -> Tuple[QepSolution, np.ndarray]:
    """Spectrum plus selected eigenvectors, and the internal damping used."""
    if solver is not None:
        return solver.solve(v, want=want), solver.cint
    cint = critical_damping(system, mf)
    return solve_qep(mf, v, QepOptions(want_vector_indices=want), system=system, cint=cint), cint


def eigen_gradients(
    system: SystemMatrices, v: np.ndarray, solution: QepSolution, cint: np.ndarray
) -> Dict[int, np.ndarray]:
    """Eigenvalue derivatives for every eigenvector the solution carries."""
    return {
        k: eigenvalue_gradient(system, v, solution.values[k], x, cint=cint) for k, x in solution.vectors.items()
    }
