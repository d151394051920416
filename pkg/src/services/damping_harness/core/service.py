from __future__ import annotations

import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ...modal_precompute.core.cache import ModalCache
from ...qep_solver.core.oracle import linearization_eigs, matched_errors
from ...qep_solver.core.service import solve_qep
from ...qep_solver.models.qep_models import QepOptions
from ..models.harness_models import Command, RunConfig
from .artifacts import write_json, write_spectrum_csv, write_table_csv
from .bench import ACCURACY_HEADER, SCALING_HEADER, run_bench_accuracy, run_bench_scaling
from .optimize import run_optimize
from .problems import build_system, prepare, random_viscosities

logger = logging.getLogger(__name__)


def run_precompute(cfg: RunConfig, cache: Optional[ModalCache] = None) -> Dict[str, Any]:
    """Run (or reuse) the offline stage and report where it is cached."""
    cache = cache or ModalCache()
    system = build_system(cfg.oscillator, cfg.alpha)
    cached = cache.path_for(system).exists()
    start = time.perf_counter()
    mf = cache.get_or_build(system)
    summary = {
        "n": mf.n,
        "r": mf.r,
        "cache_path": str(cache.path_for(system)),
        "cache_hit": cached,
        "elapsed_s": time.perf_counter() - start,
    }
    write_json(cfg.output_dir / "precompute.json", summary)
    return summary


def run_solve_qep(cfg: RunConfig, cache: Optional[ModalCache] = None) -> Dict[str, Any]:
    """One online solve at ``cfg.v`` (or a seeded 0.1 + U(0, 1)^3 draw).

    Writes the sorted spectrum CSV and a JSON summary with the spectral
    abscissa, requested eigenpair residuals and, when the oracle is enabled,
    the matched error against the dense linearization.
    """
    system, mf = prepare(cfg, cache)
    if cfg.v is not None:
        v = np.asarray(cfg.v, dtype=float)
    else:
        v = random_viscosities(np.random.default_rng(cfg.seed), mf.r)

    solution = solve_qep(mf, v, QepOptions(want_vector_indices=cfg.vectors), system=system)
    out = cfg.output_dir
    summary: Dict[str, Any] = {
        "n": mf.n,
        "v": v.tolist(),
        "spectral_abscissa": float(np.max(solution.values.real)),
        "iterations": solution.iterations,
        "stage_iterations": solution.stage_iterations,
        "spectrum": str(write_spectrum_csv(out / "spectrum.csv", solution.values)),
    }
    if solution.residuals:
        summary["residuals"] = {str(i): r for i, r in solution.residuals.items()}
        summary["refinement_warnings"] = solution.refinement_warnings
    if cfg.oracle.enabled and mf.n <= cfg.oracle.n_max:
        errors = matched_errors(solution.values, linearization_eigs(mf, v))
        summary["oracle_median_error"] = float(np.median(errors))
        summary["oracle_worst_error"] = float(np.max(errors))
    write_json(out / "solve_qep.json", summary)
    return summary


class HarnessService:
    """Dispatches a RunConfig to its command and writes the artifacts."""

    def __init__(self, cache: Optional[ModalCache] = None):
        self.cache = cache or ModalCache()

    def run(self, cfg: RunConfig) -> Any:
        logger.info(f"Running {cfg.command.value} (n={cfg.oscillator.n}, seed={cfg.seed}) into {cfg.output_dir}")
        if cfg.command == Command.precompute:
            return run_precompute(cfg, self.cache)
        if cfg.command == Command.solve_qep:
            return run_solve_qep(cfg, self.cache)
        if cfg.command == Command.bench_scaling:
            rows = run_bench_scaling(cfg)
            write_table_csv(cfg.output_dir / "bench_scaling.csv", rows, SCALING_HEADER)
            return rows
        if cfg.command == Command.bench_accuracy:
            rows = run_bench_accuracy(cfg, self.cache)
            write_table_csv(cfg.output_dir / "bench_accuracy.csv", rows, ACCURACY_HEADER)
            return rows
        return run_optimize(cfg, self.cache)

    @staticmethod
    def load_config(path: Path, **overrides: Any) -> RunConfig:
        """Validate a JSON run file, applying non-None command-line overrides."""
        merged = json.loads(Path(path).read_text())
        if not isinstance(merged, dict):
            raise ValueError(f"{path} must hold a JSON object")
        updates = {k: v for k, v in overrides.items() if v is not None}
        for key, value in updates.items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = {**merged[key], **value}
            else:
                merged[key] = value
        return RunConfig.model_validate(merged)
