from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from ...frequency_objectives.models.objective_models import ModelConfig, ModelKind
from ...nonsmooth_optimizer.models.optimizer_models import OptResult, SolverOptions
from ...system_model.models.system_models import DamperLayout, OscillatorSpec


class Command(str, Enum):
    precompute = "precompute"
    solve_qep = "solve-qep"
    bench_scaling = "bench-scaling"
    bench_accuracy = "bench-accuracy"
    optimize = "optimize"


class OracleOptions(BaseModel):
    enabled: bool = Field(default=True, description="Run the dense reference solvers")
    n_max: int = Field(default=1200, gt=0, description="Dense oracles are skipped above this order")


class BenchOptions(BaseModel):
    sizes: List[int] = Field(default_factory=lambda: [200, 400, 800], min_length=1)
    layouts: List[DamperLayout] = Field(
        default_factory=lambda: [DamperLayout.config_a, DamperLayout.config_b], min_length=1
    )
    repeats: int = Field(default=1, gt=0, description="Timing repetitions; the minimum is reported")


class RunConfig(BaseModel):
    """One dampkit run, loaded from JSON and overridden by command-line flags."""

    command: Command
    oscillator: OscillatorSpec
    alpha: float = Field(default=0.004, ge=0, description="Internal damping coefficient")
    model: Optional[ModelConfig] = None
    approach: Optional[int] = Field(default=None, ge=1, le=2, description="1 = fixed ellipses, 2 = variable ellipses")
    v: Optional[List[float]] = Field(default=None, description="Viscosities for solve-qep, drawn from the seed if omitted")
    v_init: Optional[List[float]] = Field(default=None, description="First optimization start, ones if omitted")
    vectors: Optional[Union[Literal["all"], List[int]]] = Field(
        default=None, description="Eigenvectors to compute in solve-qep"
    )
    starts: int = Field(default=1, gt=0)
    seed: int = 0
    output_dir: Path = Path("runs")
    use_cache: bool = True
    oracle: OracleOptions = Field(default_factory=OracleOptions)
    bench: BenchOptions = Field(default_factory=BenchOptions)
    solver: SolverOptions = Field(default_factory=SolverOptions)

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        if self.command == Command.optimize:
            if self.model is None:
                raise ValueError("optimize needs a 'model' section")
            if self.approach is not None:
                expected = ModelKind.model1 if self.approach == 1 else ModelKind.model2
                if self.model.kind != expected:
                    raise ValueError(f"approach {self.approach} needs a {expected.value} config, got {self.model.kind.value}")
        if self.command == Command.bench_accuracy and not self.oracle.enabled:
            raise ValueError("bench-accuracy needs the oracle enabled")
        for name in ("v", "v_init"):
            value = getattr(self, name)
            if value is not None and len(value) != 3:
                raise ValueError(f"{name} must hold 3 viscosities, got {len(value)}")
        return self


class ScalingRow(BaseModel):
    n: int
    t_offline_s: float
    t_online_s: float
    t_oracle_s: Optional[float] = None


class AccuracyRow(BaseModel):
    n: int
    layout: DamperLayout
    median_error: float
    worst_error: float
    median_residual: float
    worst_residual: float
    worst_companion_error: Optional[float] = Field(
        default=None, description="Worst matched error against the companion pencil of the raw M, C(v), K"
    )


class OptimizeReport(BaseModel):
    result: OptResult
    tol_sa: float
    v_init: List[float]
    objective_init: float
    spectral_abscissa_init: float
    spectral_abscissa_opt: float
    feasible: bool
    artifacts: Dict[str, str] = Field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "result": self.result.to_json_dict(),
            "tol_sa": self.tol_sa,
            "v_init": self.v_init,
            "objective_init": self.objective_init,
            "spectral_abscissa_init": self.spectral_abscissa_init,
            "spectral_abscissa_opt": self.spectral_abscissa_opt,
            "feasible": self.feasible,
            "artifacts": self.artifacts,
        }
