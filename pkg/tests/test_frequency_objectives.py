from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from src.services.frequency_objectives.core.barrier import barrier, barrier_derivative
from src.services.frequency_objectives.core.ellipses import (
    ellipse_distance,
    ellipse_distance_derivative,
    semi_major,
    semi_major_derivative,
    spectrum_ellipse_distance,
    spectrum_semi_major,
)
from src.services.frequency_objectives.core.model_one import model1_eval
from src.services.frequency_objectives.core.model_two import model2_eval
from src.services.frequency_objectives.core.sensitivity import eigenvalue_gradient, rightmost, spectral_abscissa
from src.services.frequency_objectives.core.service import ObjectiveEvaluator, default_tol_sa
from src.services.frequency_objectives.models.objective_models import (
    BarrierSpec,
    EllipseSpec,
    ModelConfig,
    ModelKind,
)
from src.services.modal_precompute.core.modal_form import build_modal_form
from src.services.qep_solver.core.oracle import companion_eigs
from src.services.qep_solver.core.service import solve_qep
from src.services.system_model.models.system_models import SystemMatrices

BANDS = [EllipseSpec(b=0.05, omega=0.1), EllipseSpec(b=0.05, omega=0.6), EllipseSpec(b=0.05, omega=1.1)]


def _fd_gradient(fn, v: np.ndarray, rel: float = 1e-4) -> np.ndarray:
    grad = np.empty(v.shape[0])
    for j in range(v.shape[0]):
        h = rel * max(1.0, abs(v[j]))
        e = np.zeros_like(v)
        e[j] = h
        grad[j] = (fn(v + e) - fn(v - e)) / (2.0 * h)
    return grad


def _assert_gradient(analytic: np.ndarray, fd: np.ndarray, tol: float = 1e-4) -> None:
    scale = max(float(np.linalg.norm(analytic)), 1e-8)
    assert float(np.linalg.norm(analytic - fd)) <= tol * scale


# spectral abscissa and ties


def test_spectral_abscissa_examples():
    assert spectral_abscissa(np.array([-1 + 2j, -1 - 2j, -0.5])) == -0.5
    assert spectral_abscissa(np.array([1j, -1j])) == 0.0
    with pytest.raises(ValueError):
        spectral_abscissa(np.array([]))


def test_rightmost_ignores_conjugates():
    k, tied = rightmost(np.array([-0.1 + 1j, -0.1 - 1j, -0.3 + 2j]))
    assert k == 0 and not tied
    _, tied = rightmost(np.array([-0.1 + 1j, -0.1 + 2j]))
    assert tied


# ellipses


def test_ellipse_distance_examples():
    E = EllipseSpec(a=1.0, b=2.0)
    assert ellipse_distance(E.center, E) == 0.0
    assert ellipse_distance(1.0, E) == pytest.approx(1.0)
    assert ellipse_distance(2j, E) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ellipse_distance(0.0, EllipseSpec(b=1.0))


@given(
    st.floats(0.0, 2 * math.pi),
    st.floats(0.01, 10.0),
    st.floats(0.01, 10.0),
    st.floats(0.0, 5.0),
)
def test_ellipse_boundary_level_set(theta, a, b, omega):
    E = EllipseSpec(a=a, b=b, omega=omega)
    z = E.center + a * math.cos(theta) + 1j * b * math.sin(theta)
    assert ellipse_distance(z, E) == pytest.approx(1.0, abs=1e-12)


def test_ellipse_distance_derivative_matches_difference():
    E = EllipseSpec(a=0.3, b=0.2, omega=0.95)
    z = -0.1 + 0.9j
    for dz in (1.0, 1j, 0.3 - 0.7j):
        h = 1e-7
        fd = (ellipse_distance(z + h * dz, E) - ellipse_distance(z - h * dz, E)) / (2 * h)
        assert float(ellipse_distance_derivative(z, np.array([dz]), E)[0]) == pytest.approx(fd, rel=1e-7)


def test_spectrum_distance_examples():
    E = EllipseSpec(a=0.1, b=0.2, omega=0.5)
    value, (i, j) = spectrum_ellipse_distance(np.array([0.5j, -0.5j, -1 + 3j]), [E])
    assert value == 0.0 and (i, j) == (0, 0)
    value, _ = spectrum_ellipse_distance(np.array([-1 + 3j, -1 - 3j]), [E])
    assert value > 1.0
    with pytest.raises(ValueError):
        spectrum_ellipse_distance(np.array([]), [E])


def test_semi_major_examples():
    E = EllipseSpec(b=1.0)
    assert semi_major(-3.0, E) == pytest.approx(3.0)
    assert semi_major(-3 + 0.6j, E) == pytest.approx(3.75)
    assert semi_major(-3 + 1j, E) == math.inf


@given(st.floats(-5.0, -0.01), st.floats(-0.99, 0.99), st.floats(0.01, 2.0), st.floats(0.0, 3.0))
def test_semi_major_touches_the_boundary(x, frac, b, omega):
    E = EllipseSpec(b=b, omega=omega)
    z = complex(x, omega + frac * b)
    a = semi_major(z, E)
    assert ellipse_distance(z, E.with_axis(a)) == pytest.approx(1.0, abs=1e-10)


def test_semi_major_derivative_matches_difference():
    E = EllipseSpec(b=0.05, omega=0.6)
    z = -0.01 + 0.62j
    for dz in (1.0, 1j, -0.4 + 0.2j):
        h = 1e-8
        fd = (semi_major(z + h * dz, E) - semi_major(z - h * dz, E)) / (2 * h)
        assert float(semi_major_derivative(z, np.array([dz]), E)[0]) == pytest.approx(fd, rel=1e-6)
    with pytest.raises(ValueError):
        semi_major_derivative(-1 + 0.7j, np.array([1.0]), E)


def test_spectrum_semi_major_examples():
    E = EllipseSpec(b=0.1, omega=2.0)
    assert spectrum_semi_major(np.array([-1 + 1j, -1 - 1j, -0.5 + 3j]), E) == (math.inf, None)
    value, k = spectrum_semi_major(np.array([-1 + 1j, -2 + 2j, -2 - 2j]), E)
    assert value == pytest.approx(2.0) and k == 1


# barrier


@pytest.fixture
def default_barrier() -> BarrierSpec:
    return BarrierSpec.from_bounds(-0.1, 0.0, h=1.0)


def test_barrier_examples(default_barrier):
    assert default_barrier.y == pytest.approx(-0.025)
    assert default_barrier.tau2 == 0.0
    assert barrier(-0.1, default_barrier) == 0.0
    assert barrier(default_barrier.y, default_barrier) == pytest.approx(1.0, abs=1e-12)
    assert barrier(-0.0125, default_barrier) == pytest.approx(1.693147, abs=1e-6)
    assert barrier(0.0, default_barrier) == math.inf
    assert barrier(-0.5, default_barrier) == 0.0


def test_barrier_branches_join(default_barrier):
    y, eps = default_barrier.y, 1e-9
    left = default_barrier.tau1 * (y - default_barrier.y1) ** 3
    right = -math.log((default_barrier.y2 - y) / (default_barrier.y2 - y)) + default_barrier.h
    assert abs(left - right) <= 1e-10
    d_left = barrier_derivative(y, 1.0, default_barrier)
    d_right = barrier_derivative(y + eps, 1.0, default_barrier)
    assert abs(d_left - 1.0 / (default_barrier.y2 - y)) <= 1e-10
    assert abs(d_left - d_right) <= 1e-5
    assert barrier_derivative(default_barrier.y1, 3.0, default_barrier) == 0.0


def test_barrier_is_monotone(default_barrier):
    xs = np.linspace(-0.1, -1e-6, 1000)
    values = np.array([barrier(x, default_barrier) for x in xs])
    assert np.all(np.diff(values) >= 0.0)


@given(st.floats(-0.0999, -0.0001))
def test_barrier_derivative_matches_difference(x):
    spec = BarrierSpec.from_bounds(-0.1, 0.0)
    h = 1e-9
    if abs(x - spec.y) < 2 * h:
        return
    fd = (barrier(x + h, spec) - barrier(x - h, spec)) / (2 * h)
    assert barrier_derivative(x, 1.0, spec) == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_barrier_custom_junction():
    spec = BarrierSpec.from_bounds(-1.0, 0.0, h=1.0, y=-0.5)
    left = spec.tau1 * 0.5**3 + spec.tau2 * 0.5**2
    assert left == pytest.approx(1.0, abs=1e-12)
    slope = 3 * spec.tau1 * 0.5**2 + 2 * spec.tau2 * 0.5
    assert slope == pytest.approx(1.0 / 0.5, abs=1e-12)


def test_barrier_rejects_bad_bounds():
    with pytest.raises(ValueError):
        BarrierSpec.from_bounds(0.0, -1.0)
    with pytest.raises(ValueError):
        BarrierSpec.from_bounds(-1.0, 0.0, y=0.5)
    with pytest.raises(ValueError):
        barrier_derivative(0.0, 1.0, BarrierSpec.from_bounds(-1.0, 0.0))


# eigenvalue sensitivity


def test_single_dof_gradient():
    alpha, v1 = 0.1, 0.3
    system = SystemMatrices(M=[[1.0]], K=[[1.0]], G=[[1.0]], alpha=alpha)
    lam = np.roots([1.0, alpha + v1, 1.0])[0]
    grad = eigenvalue_gradient(system, [v1], lam, np.array([1.0]))
    assert grad[0] == pytest.approx(-lam / (2 * lam + alpha + v1), rel=1e-13)


def test_gradient_vanishes_for_orthogonal_damper():
    system = SystemMatrices(M=np.eye(2), K=np.diag([1.0, 4.0]), G=[[1.0, 0.0], [0.0, 1.0]], alpha=0.0)
    lam = np.roots([1.0, 0.5, 1.0])[0]
    grad = eigenvalue_gradient(system, [0.5, 0.7], lam, np.array([1.0, 0.0]))
    assert grad[1] == 0.0


def test_gradient_matches_tracked_eigenvalue(rng):
    B = rng.standard_normal((4, 4))
    system = SystemMatrices(M=np.diag([1.0, 2.0, 3.0, 4.0]), K=B @ B.T + 4 * np.eye(4), G=rng.standard_normal((4, 3)), alpha=0.01)
    v = 0.2 + rng.random(3)
    values, X = companion_eigs(system, v, vectors=True)
    k = int(np.argmax(values.imag))
    grad = eigenvalue_gradient(system, v, values[k], X[:, k])
    for j in range(3):
        h = 1e-6
        e = np.zeros(3)
        e[j] = h
        up = companion_eigs(system, v + e)
        down = companion_eigs(system, v - e)
        fd = (up[np.argmin(np.abs(up - values[k]))] - down[np.argmin(np.abs(down - values[k]))]) / (2 * h)
        assert abs(grad[j] - fd) <= 1e-5 * max(abs(fd), 1e-2)


# model configuration


def test_model1_needs_fixed_ellipses():
    with pytest.raises(ValidationError):
        ModelConfig(kind=ModelKind.model1, ellipses=[EllipseSpec(b=0.1)])


def test_model2_config_checks():
    with pytest.raises(ValidationError):
        ModelConfig(kind=ModelKind.model2)
    with pytest.raises(ValidationError):
        ModelConfig(kind=ModelKind.model2, ellipses=BANDS, weights=[1.0, 0.0, 0.5])
    with pytest.raises(ValidationError):
        ModelConfig(kind=ModelKind.model2, ellipses=BANDS, caps=[1.0, 1.0])
    config = ModelConfig(kind=ModelKind.model2, ellipses=[EllipseSpec(a=3.0, b=0.05, omega=0.1)], eta=0.0)
    assert config.ellipses[0].a is None
    np.testing.assert_array_equal(config.resolved_caps(), [1.0])


def test_tol_sa_must_be_negative():
    with pytest.raises(ValidationError):
        ModelConfig(tol_sa=0.1)


# assembled models


def _tol_sa(system, mf, v) -> float:
    sa_v = float(np.max(solve_qep(mf, v).values.real))
    sa_0 = float(np.max(solve_qep(mf, np.zeros(mf.r)).values.real))
    return 0.9 * min(sa_v, sa_0)


def test_model1_gradients(oscillator_30, rng):
    system, mf = oscillator_30
    v0 = 0.5 + rng.random(3)
    config = ModelConfig(
        kind=ModelKind.model1,
        ellipses=[EllipseSpec(a=0.02, b=0.2, omega=0.8)],
        tol_sa=_tol_sa(system, mf, np.ones(3)),
    )
    for _ in range(3):
        v = v0 + 0.5 * rng.random(3)
        ev = model1_eval(system, mf, config, v)
        assert not ev.nonsmooth
        assert ev.constraints.shape == (5,)
        _assert_gradient(ev.objective_grad, _fd_gradient(lambda w: model1_eval(system, mf, config, w).objective, v))
        for row in range(2):
            fd = _fd_gradient(lambda w: model1_eval(system, mf, config, w).constraints[row], v)
            _assert_gradient(ev.constraint_grads[row], fd)
        np.testing.assert_array_equal(ev.constraint_grads[2:], -np.eye(3))


def test_model1_constraint_signs(oscillator_30):
    system, mf = oscillator_30
    far = ModelConfig(kind=ModelKind.model1, ellipses=[EllipseSpec(a=1e-4, b=1e-4, omega=50.0)], tol_sa=-1e-9)
    ev = model1_eval(system, mf, far, np.ones(3))
    assert ev.constraints[0] < 0.0
    assert ev.constraints[1] == pytest.approx(ev.spectral_abscissa + 1e-9)
    np.testing.assert_array_equal(ev.constraints[2:], -np.ones(3))


def test_model1_without_ellipses(oscillator_30):
    system, mf = oscillator_30
    config = ModelConfig(kind=ModelKind.model1, tol_sa=-1e-9)
    ev = model1_eval(system, mf, config, np.ones(3))
    assert ev.distance is None
    assert ev.constraints.shape == (4,)
    assert ev.objective == pytest.approx(1e4 * ev.spectral_abscissa)


def test_model_kind_mismatch(oscillator_30):
    system, mf = oscillator_30
    config = ModelConfig(kind=ModelKind.model1, tol_sa=-1e-3)
    with pytest.raises(ValueError):
        model2_eval(system, mf, config, np.ones(3))
    with pytest.raises(ValueError):
        model1_eval(system, mf, ModelConfig(), np.ones(3))


def test_model2_gradients(oscillator_30, rng):
    system, mf = oscillator_30
    config = ModelConfig(
        kind=ModelKind.model2,
        ellipses=BANDS,
        weights=[1.0, 0.2, 0.1],
        tol_sa=_tol_sa(system, mf, np.ones(3)),
    )
    checked = 0
    for _ in range(4):
        v = 0.5 + rng.random(3)
        ev = model2_eval(system, mf, config, v)
        if ev.nonsmooth or not np.isfinite(ev.objective):
            continue
        _assert_gradient(ev.objective_grad, _fd_gradient(lambda w: model2_eval(system, mf, config, w).objective, v))
        fd = _fd_gradient(lambda w: model2_eval(system, mf, config, w).constraints[0], v)
        _assert_gradient(ev.constraint_grads[0], fd)
        checked += 1
    assert checked >= 2


def test_model2_caps_active(oscillator_30):
    system, mf = oscillator_30
    sa = float(np.max(solve_qep(mf, np.ones(3)).values.real))
    assert sa < -1e-6
    # a_j >= |Re lambda| >= |sa| > cap, and sa below tol_sa keeps the barrier at zero
    config = ModelConfig(
        kind=ModelKind.model2,
        ellipses=BANDS,
        weights=[1.0, 0.2, 0.1],
        caps=[1e-9, 1e-9, 1e-9],
        tol_sa=0.5 * sa,
    )
    ev = model2_eval(system, mf, config, np.ones(3))
    assert ev.objective == pytest.approx(1e4 * 1.3e-9, rel=1e-12)
    np.testing.assert_array_equal(ev.objective_grad, np.zeros(3))


def test_model2_objective_without_bands():
    system = SystemMatrices(M=[[1.0]], K=[[1.0]], G=[[1.0]], alpha=0.1)
    mf = build_modal_form(system)
    config = ModelConfig(kind=ModelKind.model2, ellipses=[EllipseSpec(b=0.05, omega=5.0)], tol_sa=-0.5)
    ev = model2_eval(system, mf, config, [0.3])
    # sa = -0.2 sits on the cubic branch of the (-0.5, 0) barrier
    spec = config.barrier()
    assert ev.semi_axes == [math.inf]
    assert ev.objective == pytest.approx(1e4 * (1.0 - barrier(-0.2, spec)), rel=1e-10)


def test_model2_barrier_pole_gives_minus_infinity():
    system = SystemMatrices(M=[[1.0]], K=[[1.0]], G=[[1.0]], alpha=0.0)
    mf = build_modal_form(system)
    config = ModelConfig(kind=ModelKind.model2, ellipses=[EllipseSpec(b=0.05, omega=5.0)], tol_sa=-0.5)
    ev = model2_eval(system, mf, config, [0.0])
    assert ev.objective == -math.inf
    assert ev.nonsmooth
    np.testing.assert_array_equal(ev.objective_grad, [0.0])


# evaluator service


def test_evaluator_reuses_the_last_solve(oscillator_30):
    system, mf = oscillator_30
    evaluator = ObjectiveEvaluator(system, mf, ModelConfig(kind=ModelKind.model1, tol_sa=-1e-9))
    v = np.array([1.0, 2.0, 3.0])
    f, g = evaluator.objective(v)
    c, J = evaluator.constraints(v)
    assert evaluator.evaluations == 1
    assert J.shape == (4, 3) and g.shape == (3,)
    evaluator.objective(v * 1.01)
    assert evaluator.evaluations == 2
    assert not evaluator.maximize


def test_default_tol_sa(oscillator_30):
    system, mf = oscillator_30
    evaluator = ObjectiveEvaluator(system, mf, ModelConfig(kind=ModelKind.model1))
    tol = default_tol_sa(evaluator, np.ones(3))
    expected = 0.9 * min(evaluator.spectral_abscissa(np.ones(3)), evaluator.spectral_abscissa(np.zeros(3)))
    assert tol == pytest.approx(expected, rel=1e-10)
    assert evaluator.with_tol_sa(tol).config.tol_sa == tol


def test_default_tol_sa_needs_stability():
    system = SystemMatrices(M=[[1.0]], K=[[1.0]], G=[[1.0]], alpha=0.0)
    evaluator = ObjectiveEvaluator(system, build_modal_form(system), ModelConfig(kind=ModelKind.model1))
    with pytest.raises(ValueError):
        default_tol_sa(evaluator, np.zeros(1))


def test_model2_ellipse_geometry(oscillator_30):
    system, mf = oscillator_30
    config = ModelConfig(kind=ModelKind.model2, ellipses=BANDS, tol_sa=-1e-6)
    geometry = ObjectiveEvaluator(system, mf, config).ellipse_geometry(np.ones(3))
    assert len(geometry) == 3
    assert all(E.a is not None and 0.0 < E.a <= 1.0 for E in geometry)
