from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_system
from src.services.modal_precompute.core.cache import ModalCache, system_key
from src.services.modal_precompute.core.diagonalization import simultaneous_diagonalize
from src.services.modal_precompute.core.modal_form import (
    block_eigensystem,
    build_modal_form,
    modal_to_qep,
    qep_to_modal,
    with_geometry,
)
from src.services.modal_precompute.core.shuffle import inverse_permutation, perfect_shuffle
from src.services.qep_solver.core.oracle import companion_eigs, matched_errors
from src.services.system_model.core.oscillator import build_oscillator
from src.services.system_model.models.system_models import OscillatorSpec, SystemMatrices


def test_diagonal_pencil_is_reordered():
    system = SystemMatrices(M=np.eye(2), K=np.diag([4.0, 9.0]), G=[[1.0], [1.0]])
    Phi, Omega = simultaneous_diagonalize(system)
    np.testing.assert_allclose(Omega, [3.0, 2.0])
    np.testing.assert_allclose(Phi, [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)


def test_scalar_pencil():
    system = SystemMatrices(M=[[4.0]], K=[[9.0]], G=[[1.0]])
    Phi, Omega = simultaneous_diagonalize(system)
    np.testing.assert_allclose(Phi, [[0.5]])
    np.testing.assert_allclose(Omega, [1.5])


def test_modes_are_mass_orthonormal():
    system = build_oscillator(OscillatorSpec(n=200), alpha=0.004)
    Phi, Omega = simultaneous_diagonalize(system)
    assert np.linalg.norm(Phi.T @ system.M @ Phi - np.eye(200)) <= 1e-10
    assert np.all(np.diff(Omega) < 0)


def test_repeated_frequencies_rejected():
    system = SystemMatrices(M=np.eye(2), K=np.eye(2), G=[[1.0], [0.0]])
    with pytest.raises(ValueError, match="coincide"):
        simultaneous_diagonalize(system)


def test_shuffle_small_cases():
    a = np.array(["a1", "a2", "a3", "a4"])
    assert list(a[perfect_shuffle(2)]) == ["a1", "a3", "a2", "a4"]
    np.testing.assert_array_equal(perfect_shuffle(1), [0, 1])
    with pytest.raises(ValueError):
        perfect_shuffle(0)


@given(st.integers(min_value=1, max_value=200))
def test_shuffle_inverse(n):
    p = perfect_shuffle(n)
    np.testing.assert_array_equal(p[inverse_permutation(p)], np.arange(2 * n))
    np.testing.assert_array_equal(inverse_permutation(p)[p], np.arange(2 * n))


def test_undamped_rotation_block():
    system = SystemMatrices(M=[[1.0]], K=[[1.0]], G=[[1.0]], alpha=0.0)
    mf = build_modal_form(system)
    np.testing.assert_allclose(mf.D, [1j, -1j], atol=1e-15)


def test_block_eigenvalues_with_internal_damping():
    mu, Psi, Psi_inv = block_eigensystem(np.array([1.0]), 0.1)
    root = np.sqrt(complex(0.01 - 4.0))
    np.testing.assert_allclose(mu[0], [(-0.1 + root) / 2, (-0.1 - root) / 2], atol=1e-15)
    np.testing.assert_allclose(Psi[0] @ Psi_inv[0], np.eye(2), atol=1e-14)
    block = np.array([[0.0, 1.0], [-1.0, -0.1]])
    np.testing.assert_allclose(block @ Psi[0], Psi[0] * mu[0], atol=1e-14)


def test_defective_alpha_rejected():
    with pytest.raises(ValueError, match="defective"):
        block_eigensystem(np.array([1.0, 2.0]), 2.0)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_reduced_matrix_keeps_qep_spectrum(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    system = random_system(rng, n, r=min(3, n))
    mf = build_modal_form(system)
    v = 0.1 + rng.random(system.r)
    computed = np.linalg.eigvals(mf.reduced_matrix(v))
    errors = matched_errors(computed, companion_eigs(system, v))
    assert np.max(errors) <= 1e-8


def test_vector_maps_round_trip(small_system, small_modal, rng):
    v = 0.1 + rng.random(3)
    values, X = companion_eigs(small_system, v, vectors=True)
    k = int(np.argmax(values.imag))
    w = qep_to_modal(small_modal, small_system.M, values[k], X[:, k])
    A = small_modal.reduced_matrix(v)
    np.testing.assert_allclose(A @ w, values[k] * w, atol=1e-9 * np.linalg.norm(w))
    x = modal_to_qep(small_modal, w)
    cos = abs(np.vdot(x, X[:, k])) / (np.linalg.norm(x) * np.linalg.norm(X[:, k]))
    assert cos == pytest.approx(1.0, abs=1e-10)


def test_with_geometry_matches_full_rebuild(small_system, small_modal, rng):
    G = rng.standard_normal((10, 2))
    moved = with_geometry(small_modal, G)
    rebuilt = build_modal_form(small_system.model_copy(update={"G": G}))
    np.testing.assert_allclose(moved.U, rebuilt.U, atol=1e-12)
    np.testing.assert_allclose(moved.Z, rebuilt.Z, atol=1e-12)
    assert moved.Omega is small_modal.Omega


def test_modal_arrays_are_read_only(small_modal):
    with pytest.raises(ValueError):
        small_modal.D[0] = 0.0


def test_cache_round_trip(tmp_path, small_system):
    cache = ModalCache(tmp_path)
    assert cache.load(small_system) is None
    built = cache.get_or_build(small_system)
    assert cache.path_for(small_system).exists()
    loaded = cache.load(small_system)
    np.testing.assert_array_equal(loaded.D, built.D)
    np.testing.assert_array_equal(loaded.Phi, built.Phi)
    assert loaded.alpha == built.alpha


def test_cache_dir_from_environment(cache_dir):
    assert ModalCache().cache_dir == cache_dir


def test_system_key_depends_on_alpha(small_spec):
    a = build_oscillator(small_spec, alpha=0.004)
    b = build_oscillator(small_spec, alpha=0.001)
    assert system_key(a) != system_key(b)
    assert system_key(a) == system_key(build_oscillator(small_spec, alpha=0.004))
