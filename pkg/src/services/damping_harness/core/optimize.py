"""
End-to-end viscosity optimization run
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ...frequency_objectives.core.service import ObjectiveEvaluator, default_tol_sa
from ...modal_precompute.core.cache import ModalCache
from ...nonsmooth_optimizer.core.history import write_history_csv
from ...nonsmooth_optimizer.core.service import multi_start
from ...qep_solver.core.service import QepSolverService
from ..models.harness_models import OptimizeReport, RunConfig
from .artifacts import write_ellipse_csv, write_json, write_spectrum_csv
from .problems import build_problem, draw_starts, prepare

logger = logging.getLogger(__name__)


def run_optimize(cfg: RunConfig, cache: Optional[ModalCache] = None) -> OptimizeReport:
    """Offline stage, then multi-start optimization of the configured model.

    tol_sa defaults to 0.9 * min(sa(v_init), sa(0)). Writes spectra at
    v_zero, v_init and v_opt, the ellipse geometry, the iterate history and
    the result JSON under ``cfg.output_dir``.

    Raises:
        ValueError: If the config has no model or tol_sa cannot be derived
        NlpEvaluationError: If every start fails to evaluate
    """
    if cfg.model is None:
        raise ValueError("optimize needs a 'model' section")
    system, mf = prepare(cfg, cache)
    evaluator = ObjectiveEvaluator(system, mf, cfg.model, solver=QepSolverService(system, mf))
    v_init = np.asarray(cfg.v_init if cfg.v_init is not None else np.ones(mf.r), dtype=float)
    if cfg.model.tol_sa is None:
        evaluator = evaluator.with_tol_sa(default_tol_sa(evaluator, v_init))
    tol_sa = float(evaluator.config.tol_sa)

    init = evaluator.fork().evaluate(v_init)
    starts = draw_starts(v_init, cfg.starts, np.random.default_rng(cfg.seed))
    logger.info(f"Optimizing {cfg.model.kind.value} from {len(starts)} start(s), objective at v_init {init.objective:.6e}")
    result = multi_start(build_problem(evaluator), starts, cfg.solver)

    final = evaluator.fork().evaluate(result.v_opt)
    out = cfg.output_dir
    artifacts = {
        "spectrum_v_zero": str(write_spectrum_csv(out / "spectrum_v_zero.csv", evaluator.spectrum(np.zeros(mf.r)))),
        "spectrum_v_init": str(write_spectrum_csv(out / "spectrum_v_init.csv", init.spectrum)),
        "spectrum_v_opt": str(write_spectrum_csv(out / "spectrum_v_opt.csv", final.spectrum)),
        "history": str(write_history_csv(result, out / "history.csv")),
    }
    if cfg.model.ellipses:
        geometry = evaluator.fork().ellipse_geometry(result.v_opt)
        artifacts["ellipses"] = str(write_ellipse_csv(out / "ellipses.csv", geometry))

    report = OptimizeReport(
        result=result,
        tol_sa=tol_sa,
        v_init=v_init.tolist(),
        objective_init=init.objective,
        spectral_abscissa_init=init.spectral_abscissa,
        spectral_abscissa_opt=final.spectral_abscissa,
        feasible=result.is_feasible(cfg.solver.viol_tol),
        artifacts=artifacts,
    )
    report.artifacts["result"] = str(out / "result.json")
    write_json(out / "result.json", report.to_json_dict())
    return report
