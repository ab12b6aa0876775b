"""
Request Models for IIMP Sim

Pydantic models for the JSON experiment configs read by the CLI.
"""

import cmath
import math
from typing import Any, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from iimp_sim.common.enums import ExperimentKind, GridSpacing, ModelKind, Observable
from iimp_sim.common.validators import pydantic_finite_field_validator
from iimp_sim.config.constants import (
    DEFAULT_LIMIT_POINTS,
    DEFAULT_LIMIT_T_MAX,
    DEFAULT_LIMIT_T_MIN,
    TOMOGRAPHY_FIDELITY_WINDOW,
    TOMOGRAPHY_T1,
    TOMOGRAPHY_T2,
)
from iimp_sim.kernel.operators import AtomState
from iimp_sim.services.models import ModelParams

_STRICT = ConfigDict(validate_assignment=True, extra="forbid")


class ComplexValue(BaseModel):
    """Complex number as {"re", "im"}"""

    model_config = _STRICT

    re: float = 0.0
    im: float = 0.0

    validate_parts = field_validator("re", "im")(pydantic_finite_field_validator)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class FieldSpec(BaseModel):
    """Cavity field: number state, coherent state or a diagonal number-state mixture"""

    model_config = _STRICT

    kind: Literal["fock", "coherent", "fock_mixture"] = Field(..., description="Field family")
    n: int | None = Field(None, description="Photon number of a number state", ge=0)
    alpha: ComplexValue | None = Field(None, description="Coherent amplitude")
    numbers: list[int] = Field(default_factory=list, description="Mixture photon numbers")
    weights: list[float] = Field(default_factory=list, description="Mixture weights")

    @model_validator(mode="after")
    def _check_kind(self) -> Self:
        if self.kind == "fock" and self.n is None:
            raise ValueError("fock field requires n")
        if self.kind == "coherent" and self.alpha is None:
            raise ValueError("coherent field requires alpha")
        if self.kind == "fock_mixture":
            if not self.numbers or len(self.numbers) != len(self.weights):
                raise ValueError("fock_mixture requires one weight per photon number")
            if any(w < 0 for w in self.weights) or not math.isclose(sum(self.weights), 1.0):
                raise ValueError("fock_mixture weights must be non-negative and sum to 1")
        return self

    @property
    def is_mixed(self) -> bool:
        return self.kind == "fock_mixture"


class AtomSpec(BaseModel):
    """Atomic state: ground, excited or explicit two-level amplitudes"""

    model_config = _STRICT

    kind: Literal["ground", "excited", "amplitudes"] = Field("ground", description="Atom family")
    c_g: ComplexValue | None = Field(None, description="Amplitude on |g>")
    c_e: ComplexValue | None = Field(None, description="Amplitude on |e>")

    @model_validator(mode="after")
    def _check_kind(self) -> Self:
        if self.kind == "amplitudes" and (self.c_g is None or self.c_e is None):
            raise ValueError("amplitudes atom requires c_g and c_e")
        return self

    def to_atom_state(self) -> AtomState:
        if self.kind == "ground":
            return AtomState.ground()
        if self.kind == "excited":
            return AtomState.excited()
        c_g = self.c_g or ComplexValue()
        c_e = self.c_e or ComplexValue()
        return AtomState(c_g.value, c_e.value)


class StateSpec(BaseModel):
    """Product field ⊗ atom initial state"""

    model_config = _STRICT

    field: FieldSpec
    atom: AtomSpec = Field(default_factory=AtomSpec)


class TimeGridSpec(BaseModel):
    """Sample times in units of 1/g"""

    model_config = _STRICT

    t_min: float = Field(DEFAULT_LIMIT_T_MIN, ge=0)
    t_max: float = Field(DEFAULT_LIMIT_T_MAX, gt=0)
    points: int = Field(DEFAULT_LIMIT_POINTS, ge=2)
    spacing: GridSpacing = GridSpacing.LOG

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        if self.t_max <= self.t_min:
            raise ValueError("t_max must exceed t_min")
        if self.spacing is GridSpacing.LOG and self.t_min <= 0:
            raise ValueError("log spacing requires t_min > 0")
        return self


class SweepVariant(BaseModel):
    """One curve of a sweep; unset fields inherit from the config"""

    model_config = _STRICT

    label: str = Field(..., min_length=1, max_length=128, pattern=r"^[A-Za-z0-9_.\-]+$")
    kind: ModelKind | None = None
    p: int | None = Field(None, ge=1)
    N: int | None = Field(None, ge=1)
    cutoff: int | None = Field(None, ge=2)
    target_state: StateSpec | None = None
    reference_state: StateSpec | None = None


class TomographySpec(BaseModel):
    """Unknown atom and the probe schedule of the three-stage reconstruction"""

    model_config = _STRICT

    atom: AtomSpec = Field(
        default_factory=lambda: AtomSpec(
            kind="amplitudes",
            c_g=ComplexValue(re=0.6),
            c_e=ComplexValue(
                re=(0.8 * cmath.exp(1j * math.pi / 6)).real,
                im=(0.8 * cmath.exp(1j * math.pi / 6)).imag,
            ),
        )
    )
    t1: float = Field(TOMOGRAPHY_T1, ge=0, description="Stage-1 pre-evolution (1/g)")
    t2: float = Field(TOMOGRAPHY_T2, ge=0, description="Stage-2 pre-evolution (1/g)")
    alpha1: ComplexValue = Field(default_factory=lambda: ComplexValue(im=1.0))
    alpha2: ComplexValue = Field(default_factory=lambda: ComplexValue(re=1.0))
    reference_atoms: list[AtomSpec] | None = Field(
        None, description="Reference atoms of stages 0, 1, 2", min_length=3, max_length=3
    )
    window: TimeGridSpec = Field(
        default_factory=lambda: TimeGridSpec(
            t_min=1e-5,
            t_max=TOMOGRAPHY_FIDELITY_WINDOW,
            points=200,
            spacing=GridSpacing.LINEAR,
        )
    )


class QfiSpec(BaseModel):
    """QFI run settings; times in units of 1/g"""

    model_config = _STRICT

    t0: float = Field(1e-3, gt=0, description="Indirect estimate time")
    fit_t_min: float = Field(2.5e-4, gt=0)
    fit_t_max: float = Field(1e-3, gt=0)
    fit_points: int = Field(8, ge=3)
    step: float | None = Field(None, gt=0, description="Finite-difference step in g")


class ExperimentConfig(BaseModel):
    """Top-level experiment config"""

    model_config = _STRICT

    experiment: ExperimentKind
    description: str = ""
    model: ModelParams
    target_state: StateSpec | None = None
    reference_state: StateSpec | None = None
    observable: Observable | None = None
    time_grid: TimeGridSpec = Field(default_factory=TimeGridSpec)
    output_dir: str | None = None
    sweep: list[SweepVariant] = Field(default_factory=list)
    tomography: TomographySpec | None = None
    qfi: QfiSpec | None = None
    assumptions: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_experiment(self) -> Self:
        if self.experiment in (ExperimentKind.RATIO_CURVES, ExperimentKind.QFI):
            missing_target = self.target_state is None and (
                not self.sweep or any(v.target_state is None for v in self.sweep)
            )
            if missing_target or self.reference_state is None:
                raise ValueError(
                    f"{self.experiment.value} requires target_state and reference_state"
                )
        if self.experiment is ExperimentKind.TOMOGRAPHY:
            if self.model.kind is not ModelKind.JC or self.model.p != 1:
                raise ValueError("tomography requires the p = 1 JC model")
        labels = [v.label for v in self.sweep]
        if len(labels) != len(set(labels)):
            raise ValueError("sweep labels must be unique")
        return self
