from __future__ import annotations

import numpy as np
import pytest

from src.services.modal_precompute.core.modal_form import build_modal_form
from src.services.system_model.core.oscillator import build_oscillator
from src.services.system_model.models.system_models import OscillatorSpec, SystemMatrices


def random_system(rng: np.random.Generator, n: int, r: int = 3, alpha: float = 0.004) -> SystemMatrices:
    """Diagonal masses, a random SPD stiffness and a dense random damper geometry."""
    M = np.diag(rng.uniform(1.0, 5.0, n))
    B = rng.standard_normal((n, n))
    K = B @ B.T + n * np.eye(n)
    G = rng.standard_normal((n, r))
    return SystemMatrices(M=M, K=K, G=G, alpha=alpha)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_spec() -> OscillatorSpec:
    return OscillatorSpec(n=10, damper_indices=(1, 3, 5))


@pytest.fixture
def small_system(small_spec):
    return build_oscillator(small_spec, alpha=0.004)


@pytest.fixture
def small_modal(small_system):
    return build_modal_form(small_system)


@pytest.fixture
def oscillator_30():
    system = build_oscillator(OscillatorSpec(n=30, damper_indices=(3, 9, 15)), alpha=0.004)
    return system, build_modal_form(system)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    path = tmp_path / "cache"
    monkeypatch.setenv("DAMPKIT_CACHE_DIR", str(path))
    return path
