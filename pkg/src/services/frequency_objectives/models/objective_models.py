from __future__ import annotations

from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelKind(str, Enum):
    model1 = "model1"
    model2 = "model2"


class EllipseSpec(BaseModel):
    """Axis-aligned ellipse with center eta + i*omega.

    ``a`` is the semi-major (real) axis; leave it unset for the variable form
    used by the semi-major-axis measure.
    """

    a: Optional[float] = Field(default=None, gt=0, description="Semi-major axis, None for the variable form")
    b: float = Field(..., gt=0, description="Semi-minor axis (half bandwidth)")
    omega: float = Field(default=0.0, ge=0, description="Imaginary part of the center (band frequency)")
    eta: float = Field(default=0.0, ge=0, description="Real part of the center (ellipse shift)")

    @property
    def center(self) -> complex:
        return complex(self.eta, self.omega)

    @property
    def is_fixed(self) -> bool:
        return self.a is not None

    def with_axis(self, a: float) -> "EllipseSpec":
        return self.model_copy(update={"a": a})


class BarrierSpec(BaseModel):
    """Cubic-then-logarithmic barrier on (y1, y2) joined at y with value h."""

    model_config = ConfigDict(frozen=True)

    y1: float
    y2: float
    y: float
    h: float = Field(default=1.0, gt=0)
    tau1: float
    tau2: float

    @model_validator(mode="after")
    def _check_order(self) -> "BarrierSpec":
        if not (self.y1 < self.y < self.y2):
            raise ValueError(f"barrier needs y1 < y < y2, got {self.y1}, {self.y}, {self.y2}")
        return self

    @classmethod
    def from_bounds(cls, y1: float, y2: float, h: float = 1.0, y: Optional[float] = None) -> "BarrierSpec":
        """Build the barrier, defaulting the junction to y1 + 3h/(3h+1) (y2 - y1) so tau2 = 0."""
        if not y1 < y2:
            raise ValueError(f"barrier needs y1 < y2, got {y1} and {y2}")
        if h <= 0:
            raise ValueError(f"barrier height must be positive, got {h}")
        if y is None:
            y = y1 + (3.0 * h / (3.0 * h + 1.0)) * (y2 - y1)
            tau2 = 0.0
        elif not y1 < y < y2:
            raise ValueError(f"barrier junction must lie in ({y1}, {y2}), got {y}")
        else:
            tau2 = (y1 + 3.0 * h * y2 - (3.0 * h + 1.0) * y) / ((y2 - y) * (y - y1) ** 2)
        tau1 = ((2.0 * h + 1.0) * y - y1 - 2.0 * h * y2) / ((y2 - y) * (y - y1) ** 3)
        return cls(y1=y1, y2=y2, y=y, h=h, tau1=tau1, tau2=tau2)


class ModelConfig(BaseModel):
    """Which frequency-weighted model to optimize and its parameters.

    Model 1 takes fixed ellipses centered on the imaginary axis; an empty list
    reduces it to plain spectral-abscissa minimization. Model 2 takes
    variable-axis ellipses that all share the shift ``eta``.
    """

    kind: ModelKind = ModelKind.model1
    ellipses: List[EllipseSpec] = Field(default_factory=list)
    weights: Optional[List[float]] = Field(default=None, description="Band weights phi_j in (0, 1], Model 2 only")
    caps: Optional[List[float]] = Field(default=None, description="Semi-axis caps m_j > 0, default 1.0")
    tol_sa: Optional[float] = Field(
        default=None, lt=0, description="Spectral abscissa bound; None means 0.9 * min(sa(v_init), sa(v_zero))"
    )
    eta: float = Field(default=0.0, ge=0, description="Ellipse shift and barrier pole, Model 2 only")
    mu0: float = Field(default=1e4, gt=0, description="Objective prescaling")
    barrier_height: float = Field(default=1.0, gt=0, description="Barrier value h at the junction")

    @model_validator(mode="after")
    def _check_model(self) -> "ModelConfig":
        k = len(self.ellipses)
        if self.kind == ModelKind.model1:
            for j, e in enumerate(self.ellipses):
                if e.a is None:
                    raise ValueError(f"model1 ellipse {j} needs a fixed semi-major axis 'a'")
                if e.eta != 0.0:
                    raise ValueError(f"model1 ellipse {j} must be centered on the imaginary axis")
            return self

        if k == 0:
            raise ValueError("model2 needs at least one ellipse")
        self.ellipses = [e.model_copy(update={"a": None, "eta": self.eta}) for e in self.ellipses]
        if self.weights is not None:
            if len(self.weights) != k:
                raise ValueError(f"expected {k} weights, got {len(self.weights)}")
            if any(not (0.0 < w <= 1.0) for w in self.weights):
                raise ValueError(f"weights must lie in (0, 1], got {self.weights}")
        if self.caps is not None:
            if len(self.caps) != k:
                raise ValueError(f"expected {k} caps, got {len(self.caps)}")
            if any(m <= 0.0 for m in self.caps):
                raise ValueError(f"caps must be positive, got {self.caps}")
        return self

    def resolved_weights(self) -> np.ndarray:
        k = len(self.ellipses)
        return np.ones(k) if self.weights is None else np.asarray(self.weights, dtype=float)

    def resolved_caps(self) -> np.ndarray:
        k = len(self.ellipses)
        return np.ones(k) if self.caps is None else np.asarray(self.caps, dtype=float)

    def require_tol_sa(self) -> float:
        if self.tol_sa is None:
            raise ValueError("tol_sa is not set; resolve it before evaluating the model")
        return float(self.tol_sa)

    def barrier(self) -> BarrierSpec:
        return BarrierSpec.from_bounds(self.require_tol_sa(), self.eta, h=self.barrier_height)


class ModelEvaluation(BaseModel):
    """Objective, constraints and gradients of one model at one viscosity vector.

    Constraints are in ``c(v) <= 0`` form, one row of ``constraint_grads`` per
    constraint. ``objective`` is in the model's own sense (Model 2 maximizes).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    v: np.ndarray
    objective: float
    objective_grad: np.ndarray
    constraints: np.ndarray
    constraint_grads: np.ndarray
    spectral_abscissa: float
    distance: Optional[float] = Field(default=None, description="Spectrum-to-ellipses distance (Model 1)")
    semi_axes: Optional[List[float]] = Field(default=None, description="Semi-axis measures before capping (Model 2)")
    nonsmooth: bool = Field(default=False, description="An argmin/argmax was tied or a branch boundary was hit")
    spectrum: Optional[np.ndarray] = None

    @property
    def violation(self) -> float:
        return float(max(0.0, np.max(self.constraints))) if self.constraints.size else 0.0

    def summary(self) -> Dict[str, float]:
        return {
            "objective": self.objective,
            "spectral_abscissa": self.spectral_abscissa,
            "violation": self.violation,
        }
