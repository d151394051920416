from __future__ import annotations

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ....utility.array_utils import frozen_array


def _complex_vector(value) -> np.ndarray:
    return frozen_array(np.asarray(value, dtype=complex).reshape(-1))


class Dpr1(BaseModel):
    """D + rho u z^T held implicitly by its diagonal and rank-one factors."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: np.ndarray
    u: np.ndarray
    z: np.ndarray
    rho: float = Field(..., gt=0.0)

    @field_validator("d", "u", "z", mode="before")
    @classmethod
    def _to_complex(cls, value):
        return _complex_vector(value)

    @model_validator(mode="after")
    def _check_lengths(self) -> "Dpr1":
        m = self.d.shape[0]
        if m < 1:
            raise ValueError("a DPR1 matrix needs at least one diagonal entry")
        if self.u.shape[0] != m or self.z.shape[0] != m:
            raise ValueError(f"d, u, z lengths differ: {m}, {self.u.shape[0]}, {self.z.shape[0]}")
        return self

    @property
    def m(self) -> int:
        return int(self.d.shape[0])

    def dense(self) -> np.ndarray:
        return np.diag(self.d) + self.rho * np.outer(self.u, self.z)


class Dpr1Csym(BaseModel):
    """Complex symmetric D + rho z z^T.

    ``scaling`` is the diagonal of S with z = S u of the originating
    :class:`Dpr1`, and ``active`` maps each entry back to its index there.
    Both are absent for matrices built directly in symmetric form.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: np.ndarray
    z: np.ndarray
    rho: float = Field(..., gt=0.0)
    scaling: Optional[np.ndarray] = None
    active: Optional[np.ndarray] = None

    @field_validator("d", "z", mode="before")
    @classmethod
    def _to_complex(cls, value):
        return _complex_vector(value)

    @field_validator("scaling", mode="before")
    @classmethod
    def _scaling(cls, value):
        return None if value is None else _complex_vector(value)

    @field_validator("active", mode="before")
    @classmethod
    def _active(cls, value):
        return None if value is None else frozen_array(np.asarray(value, dtype=np.intp).reshape(-1))

    @model_validator(mode="after")
    def _check_lengths(self) -> "Dpr1Csym":
        m = self.d.shape[0]
        if self.z.shape[0] != m:
            raise ValueError(f"d and z lengths differ: {m} vs {self.z.shape[0]}")
        for name in ("scaling", "active"):
            extra = getattr(self, name)
            if extra is not None and extra.shape[0] != m:
                raise ValueError(f"{name} has length {extra.shape[0]}, expected {m}")
        return self

    @property
    def m(self) -> int:
        return int(self.d.shape[0])

    def dense(self) -> np.ndarray:
        return np.diag(self.d) + self.rho * np.outer(self.z, self.z)


class ExactPair(BaseModel):
    """Diagonal entry that is an eigenvalue without iteration.

    ``partner`` is set when the entry duplicated another active diagonal
    entry and was split off from it.
    """

    value: complex
    index: int
    partner: Optional[int] = None


class WarmStart(BaseModel):
    """Eigenvalues of a previous solve, in the order they were found.

    ``poles``, ``indices`` and ``couplings`` record, per value, the diagonal
    entry it was iterated from, that entry's index in the deflated diagonal
    of its step, and rho z_s^2 there. Without them each shift starts from
    its nearest diagonal entry.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    shifts: np.ndarray
    poles: Optional[np.ndarray] = None
    indices: Optional[np.ndarray] = None
    couplings: Optional[np.ndarray] = None

    @field_validator("shifts", "poles", "couplings", mode="before")
    @classmethod
    def _to_complex(cls, value):
        return None if value is None else _complex_vector(value)

    @field_validator("indices", mode="before")
    @classmethod
    def _indices(cls, value):
        return None if value is None else frozen_array(np.asarray(value, dtype=np.intp).reshape(-1))

    @model_validator(mode="after")
    def _check_lengths(self) -> "WarmStart":
        m = self.shifts.shape[0]
        for name in ("poles", "indices", "couplings"):
            extra = getattr(self, name)
            if extra is not None and extra.shape[0] != m:
                raise ValueError(f"{name} has length {extra.shape[0]}, expected {m}")
        return self


class Dpr1Options(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    tol: float = Field(default=1e-13, gt=0.0, description="Relative stopping tolerance on |delta/gamma|")
    max_inner: int = Field(default=50, ge=1, description="Secular evaluations per attempt before it counts as failed")
    initial_shifts: Optional[np.ndarray] = Field(default=None, description="Warm-start shifts, one per eigenvalue")
    warm_start: Optional[WarmStart] = Field(default=None, description="Full record of a previous solve; wins over initial_shifts")
    want_vectors: bool = True
    eta_min: float = Field(default=2.0**-20, gt=0.0, description="Smallest step size before giving up")
    sufficient_decrease: float = Field(default=0.25, gt=0.0, lt=1.0, description="Required merit decrease per unit step")

    def resolved_warm_start(self) -> Optional[WarmStart]:
        if self.warm_start is not None:
            return self.warm_start
        if self.initial_shifts is None:
            return None
        return WarmStart(shifts=self.initial_shifts)


class EigenSet(BaseModel):
    """Eigenvalues (and optionally right eigenvectors as columns) of a DPR1 matrix.

    ``matrix`` is the matrix actually decomposed: the input with negligible
    rank-one entries set to zero. ``poles``, ``pole_indices`` and
    ``couplings`` describe the iterated values only.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    vectors: Optional[np.ndarray] = None
    shifts_used: np.ndarray
    iterations: np.ndarray
    exact: np.ndarray = Field(..., description="True where the value came from an exact deflation")
    exact_pairs: List[ExactPair] = Field(default_factory=list)
    matrix: Optional[Dpr1] = None
    poles: Optional[np.ndarray] = None
    pole_indices: Optional[np.ndarray] = None
    couplings: Optional[np.ndarray] = None

    @property
    def total_iterations(self) -> int:
        return int(np.sum(self.iterations))

    @property
    def warm_shifts(self) -> np.ndarray:
        """Iterated values in the order they were found."""
        return self.values[~self.exact]

    @property
    def warm_start(self) -> WarmStart:
        return WarmStart(
            shifts=self.warm_shifts, poles=self.poles, indices=self.pole_indices, couplings=self.couplings
        )
