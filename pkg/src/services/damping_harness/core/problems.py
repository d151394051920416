from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from ...frequency_objectives.core.service import ObjectiveEvaluator
from ...modal_precompute.core.cache import ModalCache
from ...modal_precompute.core.modal_form import build_modal_form
from ...modal_precompute.models.modal_models import ModalForm
from ...nonsmooth_optimizer.models.optimizer_models import NlpProblem, OptSense
from ...system_model.core.oscillator import build_oscillator
from ...system_model.models.system_models import OscillatorSpec, SystemMatrices
from ..models.harness_models import RunConfig

logger = logging.getLogger(__name__)

# Random optimization starts are drawn uniformly from this viscosity range.
START_RANGE = (0.1, 10.0)


def build_system(spec: OscillatorSpec, alpha: float) -> SystemMatrices:
    return build_oscillator(spec, alpha)


def load_modal_form(system: SystemMatrices, use_cache: bool = True, cache: Optional[ModalCache] = None) -> ModalForm:
    """Offline stage, read from or written to the modal cache when enabled."""
    if not use_cache:
        return build_modal_form(system)
    return (cache or ModalCache()).get_or_build(system)


def prepare(cfg: RunConfig, cache: Optional[ModalCache] = None) -> Tuple[SystemMatrices, ModalForm]:
    system = build_system(cfg.oscillator, cfg.alpha)
    return system, load_modal_form(system, cfg.use_cache, cache)


def random_viscosities(rng: np.random.Generator, r: int = 3) -> np.ndarray:
    """v = 0.1 + U(0, 1)^r, the benchmark draw."""
    return 0.1 + rng.random(r)


def draw_starts(v_init: np.ndarray, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    """v_init followed by count - 1 uniform draws from START_RANGE."""
    starts = [np.asarray(v_init, dtype=float)]
    lo, hi = START_RANGE
    for _ in range(count - 1):
        starts.append(rng.uniform(lo, hi, size=starts[0].shape[0]))
    return starts


def build_problem(evaluator: ObjectiveEvaluator) -> NlpProblem:
    """Wrap a model evaluator in the solver contract; each fork gets its own QEP solver."""
    return NlpProblem(
        dimension=evaluator.mf.r,
        objective=evaluator.objective,
        constraints=evaluator.constraints,
        sense=OptSense.maximize if evaluator.maximize else OptSense.minimize,
        fork=lambda: build_problem(evaluator.fork()),
    )
