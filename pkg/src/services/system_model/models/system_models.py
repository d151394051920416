from __future__ import annotations

from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ....utility.array_utils import frozen_array


class MassProfileKind(str, Enum):
    linear_ramp = "linear_ramp"
    tent = "tent"
    explicit = "explicit"


class DamperLayout(str, Enum):
    """Named damper placements for the n-mass oscillator benchmarks."""

    config_a = "config_a"  # (n/10, 3n/10, 5n/10)
    config_b = "config_b"  # (3n/10, 7n/10, 9n/10)


class MassProfile(BaseModel):
    kind: MassProfileKind = MassProfileKind.linear_ramp
    lo: float = Field(default=10.0, gt=0, description="First mass of a linear ramp")
    hi: float = Field(default=1000.0, gt=0, description="Last mass of a linear ramp")
    values: Optional[List[float]] = Field(default=None, description="Masses for the explicit profile")

    @model_validator(mode="after")
    def _check_explicit(self) -> "MassProfile":
        if self.kind == MassProfileKind.explicit and not self.values:
            raise ValueError("explicit mass profile requires 'values'")
        return self


class OscillatorSpec(BaseModel):
    n: int = Field(..., gt=0, description="Number of masses")
    mass_profile: MassProfile = Field(default_factory=MassProfile)
    stiffness_value: float = Field(default=5.0, description="Uniform spring constant k_i")
    damper_indices: Optional[Tuple[int, int, int]] = Field(
        default=None, description="1-based mass indices (j, k, l) of the three dampers"
    )
    layout: Optional[DamperLayout] = Field(
        default=None, description="Named placement used when damper_indices is omitted"
    )

    def resolved_indices(self) -> Tuple[int, int, int]:
        if self.damper_indices is not None:
            return tuple(int(i) for i in self.damper_indices)  # type: ignore[return-value]
        layout = self.layout or DamperLayout.config_a
        n = self.n
        if layout == DamperLayout.config_a:
            return (n // 10, 3 * n // 10, 5 * n // 10)
        return (3 * n // 10, 7 * n // 10, 9 * n // 10)

    def with_size(self, n: int) -> "OscillatorSpec":
        """Same oscillator family at a different order (benchmarks sweep n)."""
        update = {"n": n}
        if self.damper_indices is not None and self.layout is not None:
            update["damper_indices"] = None
        return self.model_copy(update=update)


class SystemMatrices(BaseModel):
    """Mass, stiffness and damper geometry of M x'' + C(v) x' + K x = 0.

    Arrays are copied and frozen on construction so instances can be shared
    between threads.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    M: np.ndarray
    K: np.ndarray
    G: np.ndarray
    alpha: float = Field(default=0.0, ge=0.0, description="Internal damping multiple of critical damping")

    @field_validator("M", "K", "G", mode="before")
    @classmethod
    def _as_real_array(cls, value):
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return frozen_array(arr)

    @model_validator(mode="after")
    def _check_structure(self) -> "SystemMatrices":
        from ..utils.validation import validate_geometry, validate_spd

        validate_spd("M", self.M)
        validate_spd("K", self.K)
        if self.M.shape != self.K.shape:
            raise ValueError(f"M and K shapes differ: {self.M.shape} vs {self.K.shape}")
        validate_geometry(self.G, self.M.shape[0])
        return self

    @property
    def n(self) -> int:
        return int(self.M.shape[0])

    @property
    def r(self) -> int:
        return int(self.G.shape[1])
