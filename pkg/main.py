from __future__ import annotations

import json
import logging
import traceback
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.services.damping_harness.core.service import HarnessService
from src.services.damping_harness.models.harness_models import Command, OptimizeReport, RunConfig
from src.services.dpr1_solver.core.errors import DefectiveMatrixError, Dpr1ConvergenceError, PoleError
from src.services.frequency_objectives.core.errors import SensitivityError
from src.services.nonsmooth_optimizer.core.errors import NlpEvaluationError
from src.services.qep_solver.core.errors import QepStageError
from src.utility.constants_manager import ConstantsManager

logger = logging.getLogger("dampkit")

EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (
    Dpr1ConvergenceError,
    QepStageError,
    PoleError,
    DefectiveMatrixError,
    SensitivityError,
    NlpEvaluationError,
    np.linalg.LinAlgError,
)

app = typer.Typer(name="dampkit", help="QEP eigensolver and damper viscosity optimization.", no_args_is_help=True)
console = Console()
constants = ConstantsManager()


class OracleSwitch(str, Enum):
    on = "on"
    off = "off"


def _configure_logging(level: Optional[str]) -> None:
    logging.basicConfig(
        level=(level or constants.get_log_level()).upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=False, show_path=False)],
        force=True,
    )


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Root log level, default from DAMPKIT_LOG_LEVEL"),
):
    _configure_logging(log_level)


def _load(
    command: Command,
    config: Path,
    seed: Optional[int],
    out: Optional[Path],
    oracle: Optional[OracleSwitch],
    approach: Optional[int],
    starts: Optional[int],
) -> RunConfig:
    overrides = {
        "command": command.value,
        "seed": seed,
        "output_dir": out,
        "approach": approach,
        "starts": starts,
        "oracle": {"enabled": oracle == OracleSwitch.on} if oracle is not None else None,
    }
    cfg = HarnessService.load_config(config, **overrides)
    if cfg.solver.workers == 1:
        cfg.solver = cfg.solver.model_copy(update={"workers": constants.get_workers()})
    return cfg


def _print_rows(title: str, rows) -> None:
    if not rows:
        console.print(f"{title}: no rows")
        return
    table = Table(title=title)
    names = list(type(rows[0]).model_fields)
    for name in names:
        table.add_column(name)
    for row in rows:
        table.add_row(*[_cell(getattr(row, name)) for name in names])
    console.print(table)


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(getattr(value, "value", value))


def _print_report(report: OptimizeReport) -> None:
    result = report.result
    console.print(f"status: [bold]{result.status.value}[/bold]  feasible: {report.feasible}")
    console.print(f"v_opt: {np.array2string(result.v_opt, precision=6)}")
    console.print(f"objective: {report.objective_init:.6e} -> {result.objective_final:.6e}")
    console.print(
        f"spectral abscissa: {report.spectral_abscissa_init:.6e} -> {report.spectral_abscissa_opt:.6e}"
        f" (tol_sa {report.tol_sa:.6e})"
    )
    console.print(f"artifacts: {report.artifacts.get('result')}")


def _run(command: Command, config: Path, seed, out, oracle, approach, starts) -> None:
    try:
        cfg = _load(command, config, seed, out, oracle, approach, starts)
        result = HarnessService().run(cfg)
    # LinAlgError subclasses ValueError, so numerical failures are matched first
    except NUMERICAL_ERRORS as e:
        logger.error(f"Numerical failure in {command.value}: {str(e)}\n{traceback.format_exc()}")
        raise typer.Exit(code=EXIT_NUMERICAL)
    except (ValidationError, ValueError) as e:
        logger.error(f"Invalid input for {command.value}: {str(e)}")
        raise typer.Exit(code=EXIT_USAGE)
    except FileNotFoundError as e:
        logger.error(f"Config not found: {str(e)}")
        raise typer.Exit(code=EXIT_USAGE)

    if command in (Command.bench_scaling, Command.bench_accuracy):
        _print_rows(command.value, result)
    elif command == Command.optimize:
        _print_report(result)
        if not result.feasible:
            logger.error("Optimization ended infeasible; artifacts written")
            raise typer.Exit(code=EXIT_INFEASIBLE)
    else:
        console.print_json(json.dumps(result, default=str))


ConfigOpt = typer.Option(..., "--config", "-c", help="RunConfig JSON file")
SeedOpt = typer.Option(None, "--seed", help="Override the RNG seed")
OutOpt = typer.Option(None, "--out", help="Override the output directory")
OracleOpt = typer.Option(None, "--oracle", help="Enable or disable the dense oracles")
ApproachOpt = typer.Option(None, "--approach", min=1, max=2, help="1 = fixed ellipses, 2 = variable ellipses")
StartsOpt = typer.Option(None, "--starts", min=1, help="Number of optimization starts")


@app.command("precompute")
def precompute(config: Path = ConfigOpt, seed: Optional[int] = SeedOpt, out: Optional[Path] = OutOpt):
    """Compute and cache the offline modal form."""
    _run(Command.precompute, config, seed, out, None, None, None)


@app.command("solve-qep")
def solve_qep(
    config: Path = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: Optional[Path] = OutOpt,
    oracle: Optional[OracleSwitch] = OracleOpt,
):
    """Solve one QEP and write its spectrum."""
    _run(Command.solve_qep, config, seed, out, oracle, None, None)


@app.command("bench-scaling")
def bench_scaling(
    config: Path = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: Optional[Path] = OutOpt,
    oracle: Optional[OracleSwitch] = OracleOpt,
):
    """Offline, online and dense-solver timings per n."""
    _run(Command.bench_scaling, config, seed, out, oracle, None, None)


@app.command("bench-accuracy")
def bench_accuracy(
    config: Path = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: Optional[Path] = OutOpt,
    oracle: Optional[OracleSwitch] = OracleOpt,
):
    """Eigenvalue errors and residuals against the dense linearization."""
    _run(Command.bench_accuracy, config, seed, out, oracle, None, None)


@app.command("optimize")
def optimize(
    config: Path = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: Optional[Path] = OutOpt,
    approach: Optional[int] = ApproachOpt,
    starts: Optional[int] = StartsOpt,
):
    """Optimize damper viscosities; exits 1 when the result is infeasible."""
    _run(Command.optimize, config, seed, out, None, approach, starts)


@app.command("schema")
def schema():
    """Print the JSON schema of a run file."""
    console.print_json(json.dumps(RunConfig.model_json_schema()))


if __name__ == "__main__":
    app()
