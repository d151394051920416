from __future__ import annotations

import numpy as np
import pytest

from conftest import random_system
from src.services.modal_precompute.core.modal_form import build_modal_form
from src.services.qep_solver.core.oracle import (
    companion_eigs,
    componentwise_errors,
    greedy_match,
    linearization_eigs,
    matched_errors,
)
from src.services.qep_solver.core.refinement import refine_eigenpair, smw_solve
from src.services.qep_solver.core.service import QepSolverService, solve_qep, sort_order
from src.services.qep_solver.models.qep_models import QepOptions
from src.services.system_model.core.damping import qep_residual
from src.services.system_model.core.oscillator import build_oscillator
from src.services.system_model.models.system_models import MassProfile, OscillatorSpec, SystemMatrices


def _scalar(alpha: float) -> tuple:
    system = SystemMatrices(M=[[1.0]], K=[[1.0]], G=[[1.0]], alpha=alpha)
    return system, build_modal_form(system)


def test_undamped_single_mass():
    _, mf = _scalar(0.0)
    solution = solve_qep(mf, [0.0])
    np.testing.assert_allclose(solution.values, [1j, -1j], atol=1e-15)


def test_internally_damped_single_mass():
    _, mf = _scalar(0.1)
    solution = solve_qep(mf, [0.0])
    im = np.sqrt(1.0 - 0.05**2)
    np.testing.assert_allclose(solution.values, [-0.05 + 1j * im, -0.05 - 1j * im], atol=1e-14)


def test_single_mass_with_damper():
    system, mf = _scalar(0.1)
    solution = solve_qep(mf, [0.3], QepOptions(want_vector_indices="all"), system=system)
    roots = np.roots([1.0, 0.4, 1.0])
    assert np.max(matched_errors(solution.values, roots)) <= 1e-13
    assert max(solution.residuals.values()) <= 1e-14


def test_output_order():
    values = np.array([-1 + 1j, -2 + 1j, -0.5 - 3j, -0.1 + 5j])
    np.testing.assert_array_equal(values[sort_order(values)], [-0.1 + 5j, -2 + 1j, -1 + 1j, -0.5 - 3j])


@pytest.mark.parametrize("seed", range(25))
def test_random_systems_match_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 11))
    system = random_system(rng, n)
    mf = build_modal_form(system)
    v = 0.1 + rng.random(3)
    solution = solve_qep(mf, v)
    assert solution.values.shape == (2 * n,)
    assert np.max(matched_errors(solution.values, companion_eigs(system, v))) <= 1e-8


def test_oscillator_eigenpairs(rng):
    system = build_oscillator(OscillatorSpec(n=5, damper_indices=(1, 2, 4)), alpha=0.004)
    mf = build_modal_form(system)
    v = 0.1 + rng.random(3)
    solution = solve_qep(mf, v, QepOptions(want_vector_indices="all"), system=system)
    assert np.max(matched_errors(solution.values, linearization_eigs(mf, v))) <= 1e-8
    assert np.max(matched_errors(solution.values, companion_eigs(system, v))) <= 1e-8
    assert max(solution.residuals.values()) <= 1e-11
    assert solution.conjugate_gap() <= 1e-8


def test_zero_viscosity_is_diagonal(small_modal):
    solution = solve_qep(small_modal, np.zeros(3))
    assert solution.iterations == 0
    assert np.max(matched_errors(solution.values, small_modal.D)) <= 1e-12


def test_negative_viscosity_is_allowed(small_system, small_modal):
    v = np.array([0.5, -0.2, 0.3])
    solution = solve_qep(small_modal, v)
    assert np.max(matched_errors(solution.values, companion_eigs(small_system, v))) <= 1e-8


def test_vector_selection(small_system, small_modal):
    v = np.array([0.4, 0.9, 0.2])
    solution = solve_qep(
        small_modal, v, QepOptions(want_vector_indices=lambda vals: [int(np.argmax(vals.real))]), system=small_system
    )
    (k,) = solution.vectors
    assert solution.values[k].real == np.max(solution.values.real)
    assert solution.residuals[k] <= 1e-11
    with pytest.raises(ValueError):
        solve_qep(small_modal, v, QepOptions(want_vector_indices=[99]))


def test_wrong_viscosity_length(small_modal):
    with pytest.raises(ValueError):
        solve_qep(small_modal, [1.0, 2.0])


def test_smw_matches_dense_solve(small_modal, rng):
    v = rng.random(3)
    lam = 0.3 + 0.7j
    w = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    dense = np.linalg.solve(small_modal.reduced_matrix(v) - lam * np.eye(20), w)
    np.testing.assert_allclose(smw_solve(small_modal, v, lam, w), dense, rtol=1e-10, atol=1e-12)


def test_refinement_reduces_residual(rng):
    system = build_oscillator(OscillatorSpec(n=50, damper_indices=(5, 15, 25)), alpha=0.004)
    mf = build_modal_form(system)
    v = 0.1 + rng.random(3)
    values, X = companion_eigs(system, v, vectors=True)
    k = int(np.argmax(values.imag))
    x = X[:, k] / np.linalg.norm(X[:, k])
    noisy = x + 1e-6 * (rng.standard_normal(50) + 1j * rng.standard_normal(50))
    before = qep_residual(system, v, values[k], noisy)
    result = refine_eigenpair(system, mf, v, values[k], noisy)
    assert result.improved
    assert result.residual_after <= before * 1e-3


def test_refinement_keeps_exact_pair():
    system, mf = _scalar(0.0)
    lam = np.roots([1.0, 0.5, 1.0])[0]
    result = refine_eigenpair(system, mf, np.array([0.5]), lam, np.array([1.0 + 0j]))
    assert abs(abs(result.vector[0]) - 1.0) <= 1e-14
    assert result.residual_after <= 1e-15


def test_greedy_match_and_errors():
    computed = np.array([1.0 + 1j, 2.0 - 1j])
    reference = np.array([2.0 - 1j, 1.0 + 1j + 1e-10])
    np.testing.assert_array_equal(greedy_match(computed, reference), [1, 0])
    errors = componentwise_errors(np.array([1.0 + 1e-20j]), np.array([1.0 + 0j]))
    assert errors[0] == pytest.approx(1e-20)
    with pytest.raises(ValueError):
        greedy_match(computed, reference[:1])


def test_warm_start_saves_iterations(rng):
    system = build_oscillator(OscillatorSpec(n=60, damper_indices=(6, 18, 30)), alpha=0.004)
    mf = build_modal_form(system)
    service = QepSolverService(system, mf)
    wins = 0
    for _ in range(10):
        v = 0.1 + rng.random(3)
        service.reset()
        service.solve(v)
        nudged = v * (1.0 + 1e-3 * rng.uniform(-1.0, 1.0, 3))
        warm = service.solve(nudged)
        cold = service.fork().solve(nudged, warm=False)
        assert np.max(matched_errors(warm.values, cold.values)) <= 1e-9
        wins += warm.iterations < cold.iterations
    assert wins >= 8


def test_fork_starts_cold(small_system, small_modal):
    service = QepSolverService(small_system, small_modal)
    service.solve(np.ones(3))
    assert service._warm is not None
    assert service.fork()._warm is None


def test_warm_cache_keeps_pole_record(small_modal):
    solution = solve_qep(small_modal, [0.5, 0.0, 1.5])
    stages = solution.warm_cache.stages
    assert len(stages) == 3
    assert stages[1] is None
    for stage in (stages[0], stages[2]):
        assert stage.poles is not None and stage.indices is not None
        assert stage.shifts.shape == stage.couplings.shape


def test_refinement_polishes_eigenvalue(rng):
    system = build_oscillator(OscillatorSpec(n=50, damper_indices=(5, 15, 25)), alpha=0.004)
    mf = build_modal_form(system)
    v = 0.1 + rng.random(3)
    values, X = companion_eigs(system, v, vectors=True)
    k = int(np.argmax(values.imag))
    result = refine_eigenpair(system, mf, v, values[k] + 1e-9 * (1 + 1j), X[:, k])
    assert abs(result.value - values[k]) <= 1e-10 * abs(values[k])
    assert result.residual_after <= 1e-11


def test_clustered_tent_spectrum_matches_linearization():
    spec = OscillatorSpec(n=200, mass_profile=MassProfile(kind="tent"), damper_indices=(20, 80, 180))
    system = build_oscillator(spec, alpha=0.001)
    mf = build_modal_form(system)
    v = np.array([2.0, 3.0, 4.0])
    solution = solve_qep(mf, v, QepOptions(want_vector_indices="all"), system=system)
    assert np.max(matched_errors(solution.values, linearization_eigs(mf, v))) <= 1e-8
    assert max(solution.residuals.values()) <= 1e-11
