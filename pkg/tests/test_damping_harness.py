from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError
from typer.testing import CliRunner

from main import app
from src.services.damping_harness.core.artifacts import ELLIPSE_HEADER, SPECTRUM_HEADER
from src.services.damping_harness.core.bench import ACCURACY_HEADER, SCALING_HEADER
from src.services.damping_harness.core.problems import START_RANGE, draw_starts, random_viscosities
from src.services.damping_harness.core.service import HarnessService
from src.services.damping_harness.models.harness_models import Command, RunConfig
from src.services.modal_precompute.core.cache import ModalCache

runner = CliRunner()

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

OSCILLATOR = {"n": 20, "damper_indices": [2, 6, 10]}
MODEL1 = {"kind": "model1", "ellipses": [{"a": 0.001, "b": 0.2, "omega": 0.5}]}


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _write_config(tmp_path, **fields):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"oscillator": OSCILLATOR, "output_dir": str(tmp_path / "out"), **fields}))
    return path


# configuration


def test_optimize_needs_a_model():
    with pytest.raises(ValidationError):
        RunConfig(command=Command.optimize, oscillator=OSCILLATOR)


def test_approach_must_match_model():
    with pytest.raises(ValidationError):
        RunConfig(command=Command.optimize, oscillator=OSCILLATOR, model=MODEL1, approach=2)
    cfg = RunConfig(command=Command.optimize, oscillator=OSCILLATOR, model=MODEL1, approach=1)
    assert cfg.model.ellipses[0].a == 0.001


def test_viscosity_lengths():
    with pytest.raises(ValidationError):
        RunConfig(command=Command.solve_qep, oscillator=OSCILLATOR, v=[1.0, 2.0])
    with pytest.raises(ValidationError):
        RunConfig(command=Command.optimize, oscillator=OSCILLATOR, model=MODEL1, v_init=[1.0])


def test_accuracy_needs_oracle():
    with pytest.raises(ValidationError):
        RunConfig(command=Command.bench_accuracy, oscillator=OSCILLATOR, oracle={"enabled": False})


def test_load_config_overrides(tmp_path):
    path = _write_config(tmp_path, seed=3, oracle={"n_max": 50})
    cfg = HarnessService.load_config(path, command="solve-qep", seed=None, oracle={"enabled": False})
    assert cfg.command == Command.solve_qep
    assert cfg.seed == 3
    assert not cfg.oracle.enabled
    assert cfg.oracle.n_max == 50


def test_load_config_rejects_non_objects(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2]")
    with pytest.raises(ValueError):
        HarnessService.load_config(path, command="precompute")


def test_shipped_configs_validate():
    for name, command in [
        ("approach1.json", "optimize"),
        ("approach2_a.json", "optimize"),
        ("approach2_b.json", "optimize"),
        ("spectral_abscissa.json", "optimize"),
        ("bench_scaling.json", "bench-scaling"),
        ("bench_accuracy.json", "bench-accuracy"),
        ("solve_qep.json", "solve-qep"),
    ]:
        cfg = HarnessService.load_config(CONFIGS / name, command=command)
        assert cfg.command.value == command


# problem helpers


def test_random_viscosities(rng):
    v = random_viscosities(rng)
    assert v.shape == (3,)
    assert np.all((v >= 0.1) & (v < 1.1))


def test_draw_starts(rng):
    starts = draw_starts(np.ones(3), 4, rng)
    assert len(starts) == 4
    np.testing.assert_array_equal(starts[0], np.ones(3))
    lo, hi = START_RANGE
    assert all(np.all((s >= lo) & (s < hi)) for s in starts[1:])
    assert draw_starts(np.ones(3), 1, rng)[0].shape == (3,)


# commands


def test_precompute_uses_the_cache(tmp_path):
    service = HarnessService(cache=ModalCache(tmp_path / "cache"))
    cfg = RunConfig(command=Command.precompute, oscillator=OSCILLATOR, output_dir=tmp_path / "out")
    first = service.run(cfg)
    second = service.run(cfg)
    assert (first["n"], first["r"]) == (20, 3)
    assert not first["cache_hit"]
    assert second["cache_hit"]
    assert json.loads((tmp_path / "out" / "precompute.json").read_text())["cache_hit"] is True


def test_solve_qep_run(tmp_path):
    cfg = RunConfig(
        command=Command.solve_qep,
        oscillator=OSCILLATOR,
        v=[0.5, 1.0, 1.5],
        vectors=[0, 1],
        use_cache=False,
        output_dir=tmp_path,
    )
    summary = HarnessService().run(cfg)
    rows = _rows(tmp_path / "spectrum.csv")
    assert rows[0] == SPECTRUM_HEADER
    assert len(rows) == 41
    assert summary["spectral_abscissa"] < 0.0
    assert summary["oracle_worst_error"] <= 1e-8
    assert set(summary["residuals"]) == {"0", "1"}
    assert max(summary["residuals"].values()) <= 1e-10


def test_solve_qep_draws_from_seed(tmp_path):
    cfg = RunConfig(command=Command.solve_qep, oscillator=OSCILLATOR, seed=7, use_cache=False, output_dir=tmp_path)
    summary = HarnessService().run(cfg)
    np.testing.assert_allclose(summary["v"], random_viscosities(np.random.default_rng(7)))


def test_bench_scaling_run(tmp_path):
    cfg = RunConfig(
        command=Command.bench_scaling,
        oscillator={"n": 20, "layout": "config_b"},
        bench={"sizes": [20, 40]},
        oracle={"n_max": 30},
        output_dir=tmp_path,
    )
    rows = HarnessService().run(cfg)
    assert [row.n for row in rows] == [20, 40]
    assert rows[0].t_oracle_s is not None and rows[1].t_oracle_s is None
    table = _rows(tmp_path / "bench_scaling.csv")
    assert table[0] == SCALING_HEADER
    assert table[2][3] == ""


def test_bench_accuracy_run(tmp_path):
    cfg = RunConfig(
        command=Command.bench_accuracy,
        oscillator={"n": 20},
        bench={"sizes": [20, 30]},
        use_cache=False,
        output_dir=tmp_path,
    )
    rows = HarnessService().run(cfg)
    assert len(rows) == 4
    assert all(row.worst_error <= 1e-8 for row in rows)
    assert all(row.worst_residual <= 1e-11 for row in rows)
    assert all(row.worst_companion_error <= 1e-7 for row in rows)
    assert _rows(tmp_path / "bench_accuracy.csv")[0] == ACCURACY_HEADER


def test_optimize_run(tmp_path):
    cfg = RunConfig(
        command=Command.optimize,
        oscillator=OSCILLATOR,
        model=MODEL1,
        solver={"max_iter": 5},
        use_cache=False,
        output_dir=tmp_path,
    )
    report = HarnessService().run(cfg)
    assert report.tol_sa < 0.0
    assert report.v_init == [1.0, 1.0, 1.0]
    for name in ("spectrum_v_zero", "spectrum_v_init", "spectrum_v_opt", "history", "ellipses"):
        assert (tmp_path / f"{name}.csv").exists()
    assert _rows(tmp_path / "ellipses.csv")[0] == ELLIPSE_HEADER
    saved = json.loads((tmp_path / "result.json").read_text())
    assert saved["feasible"] == report.feasible
    assert len(saved["result"]["v_opt"]) == 3


# command line


def test_cli_rejects_unknown_approach(tmp_path):
    path = _write_config(tmp_path, model=MODEL1)
    result = runner.invoke(app, ["optimize", "--config", str(path), "--approach", "3"])
    assert result.exit_code == 2


def test_cli_missing_config(tmp_path):
    result = runner.invoke(app, ["precompute", "--config", str(tmp_path / "missing.json")])
    assert result.exit_code == 2


def test_cli_invalid_config(tmp_path):
    path = _write_config(tmp_path, v=[1.0])
    result = runner.invoke(app, ["solve-qep", "--config", str(path)])
    assert result.exit_code == 2


def test_cli_solve_qep(tmp_path, cache_dir):
    path = _write_config(tmp_path)
    result = runner.invoke(app, ["solve-qep", "--config", str(path), "--seed", "2", "--oracle", "off"])
    assert result.exit_code == 0, result.output
    summary = json.loads((tmp_path / "out" / "solve_qep.json").read_text())
    assert "oracle_worst_error" not in summary
    assert cache_dir.exists()


def test_cli_schema():
    result = runner.invoke(app, ["schema"])
    assert result.exit_code == 0
    assert "oscillator" in result.output
