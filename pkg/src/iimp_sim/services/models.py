"""
Model Builder for IIMP Sim

Builds the extended p-photon Rabi, Jaynes-Cummings, Dicke and Tavis-Cummings
Hamiltonians from a single parameter record so that cross-model
comparisons are parameter-identical by construction.

    Rabi:  w_a a†a + (w_0/2) s_z + g (a†^p + a^p)(s_- + s_+) + (U/2) a†²a² + gamma a†a s_z
    JC:    same with coupling g (a†^p s_- + s_+ a^p)
    Dicke: w_a a†a + w_0 J_z + g (a†^p + a^p)(J_- + J_+) + (U/2) a†²a² + gamma a†a J_z
    TC:    same with coupling g (a†^p J_- + J_+ a^p)
"""

import logging
import math
from dataclasses import dataclass
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from iimp_sim.common.enums import ModelKind, Observable
from iimp_sim.common.validators import pydantic_finite_field_validator
from iimp_sim.config.constants import (
    DEFAULT_COUPLING,
    DEFAULT_DISPERSIVE,
    DEFAULT_KERR,
    DEFAULT_NUMBER_CUTOFF,
    DEFAULT_OMEGA_0,
    DEFAULT_OMEGA_A,
)
from iimp_sim.kernel.hilbert import Ket, Operator, compose, identity
from iimp_sim.kernel.operators import (
    FockCutoff,
    collective_spin,
    correlation_moment,
    ladder_power,
    number_operator,
    pauli_ops,
    quadrature_moment,
)
from iimp_sim.services.exceptions import ParameterError

_log = logging.getLogger(__name__)


class ModelParams(BaseModel):
    """Parameters defining one Hamiltonian; frequencies in units of omega_a"""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    kind: ModelKind = Field(..., description="Hamiltonian family")
    omega_a: float = Field(DEFAULT_OMEGA_A, description="Cavity frequency")
    omega_0: float = Field(DEFAULT_OMEGA_0, description="Atomic transition frequency")
    g: float = Field(DEFAULT_COUPLING, description="Dipole coupling strength")
    U: float = Field(DEFAULT_KERR, description="Kerr strength")
    gamma: float = Field(DEFAULT_DISPERSIVE, description="Dispersive coupling")
    p: int = Field(1, description="Photons exchanged per transition", ge=1)
    N: int = Field(1, description="Atom count (1 for Rabi/JC)", ge=1)
    cutoff: int = Field(DEFAULT_NUMBER_CUTOFF, description="Fock cutoff d", ge=2)

    validate_frequencies = field_validator("omega_a", "omega_0", "g", "U", "gamma")(
        pydantic_finite_field_validator
    )

    @model_validator(mode="after")
    def _check_invariants(self) -> Self:
        if not self.kind.is_collective and self.N != 1:
            raise ValueError(f"{self.kind.value} model requires N = 1, got N = {self.N}")
        if self.cutoff < self.p + 2:
            raise ValueError(f"cutoff {self.cutoff} must be >= p + 2 = {self.p + 2}")
        return self

    @property
    def fock(self) -> FockCutoff:
        return FockCutoff(self.cutoff)

    @property
    def spin_dim(self) -> int:
        """Dimension of the atomic factor"""
        return self.N + 1

    @property
    def dim(self) -> int:
        return self.cutoff * self.spin_dim

    def with_coupling(self, g: float) -> "ModelParams":
        """Copy with g replaced"""
        return self.model_copy(update={"g": g})

    def with_cutoff(self, cutoff: int) -> "ModelParams":
        """Copy with the Fock cutoff replaced"""
        return ModelParams.model_validate({**self.model_dump(), "cutoff": cutoff})


def check_params(params: ModelParams) -> None:
    """Re-check invariants on records built without validation (model_copy/model_construct)

    Raises:
        ParameterError: On any invariant violation
    """
    for name in ("omega_a", "omega_0", "g", "U", "gamma"):
        if not math.isfinite(getattr(params, name)):
            raise ParameterError(f"{name} must be finite", field=name)
    if params.p < 1:
        raise ParameterError(f"p must be >= 1, got {params.p}", field="p")
    if not params.kind.is_collective and params.N != 1:
        raise ParameterError(
            f"{params.kind.value} model requires N = 1, got N = {params.N}", field="N"
        )
    if params.cutoff < params.p + 2:
        raise ParameterError(
            f"cutoff {params.cutoff} must be >= p + 2 = {params.p + 2}", field="cutoff"
        )


@dataclass(frozen=True)
class _AtomFactor:
    """Atomic operators of one model family"""

    z: Operator
    raising: Operator
    lowering: Operator
    z_weight: float
    excitation: Operator


def _atom_factor(params: ModelParams) -> _AtomFactor:
    if params.kind.is_collective:
        spin = collective_spin(params.N)
        shift = identity(spin.dim).matrix * (params.N / 2)
        return _AtomFactor(
            z=spin.j_z,
            raising=spin.j_plus,
            lowering=spin.j_minus,
            z_weight=params.omega_0,
            excitation=Operator(spin.j_z.matrix + shift, hermitian=True),
        )
    pauli = pauli_ops()
    return _AtomFactor(
        z=pauli.sigma_z,
        raising=pauli.sigma_plus,
        lowering=pauli.sigma_minus,
        z_weight=params.omega_0 / 2,
        excitation=pauli.sigma_plus @ pauli.sigma_minus,
    )


def dH_dg(params: ModelParams) -> Operator:
    """Coupling operator dH/dg"""
    check_params(params)
    atom = _atom_factor(params)
    ap = ladder_power(params.fock, params.p)
    if params.kind.is_rotating_wave:
        coupling = compose(ap.dag(), atom.lowering) + compose(ap, atom.raising)
    else:
        coupling = compose(ap + ap.dag(), atom.lowering + atom.raising)
    return Operator(coupling.matrix, hermitian=True)


def build_hamiltonian(params: ModelParams) -> Operator:
    """Hermitian Hamiltonian on the field ⊗ atom space of dimension cutoff * (N + 1)"""
    check_params(params)
    atom = _atom_factor(params)
    n = number_operator(params.fock)
    kerr = Operator(np.diag(np.diag(n.matrix) * (np.diag(n.matrix) - 1)))
    i_atom = identity(params.spin_dim)
    i_field = identity(params.cutoff)

    h = (
        compose(n, i_atom).matrix * params.omega_a
        + compose(i_field, atom.z).matrix * atom.z_weight
        + dH_dg(params).matrix * params.g
        + compose(kerr, i_atom).matrix * (params.U / 2)
        + compose(n, atom.z).matrix * params.gamma
    )
    _log.debug(
        f"Built {params.kind.value} Hamiltonian p={params.p} N={params.N} dim={params.dim}"
    )
    return Operator(h, hermitian=True)


def excitation_number(params: ModelParams) -> Operator:
    """N_e = a†a + p * (atomic excitation), conserved by JC and TC

    Raises:
        ParameterError: For the Rabi and Dicke models, which do not conserve it
    """
    if not params.kind.is_rotating_wave:
        raise ParameterError(
            f"{params.kind.value} model does not conserve the excitation number", field="kind"
        )
    atom = _atom_factor(params)
    n = number_operator(params.fock)
    total = compose(n, identity(params.spin_dim)) + compose(
        identity(params.cutoff), atom.excitation
    ).scaled(params.p)
    return Operator(total.matrix, hermitian=True)


def probe_observable(params: ModelParams, observable: Observable | None = None) -> Operator:
    """Directly measured observable on the composite space

    Defaults to the atomic energy (sigma_z or J_z) of the model family.
    """
    if observable is None:
        observable = Observable.J_Z if params.kind.is_collective else Observable.SIGMA_Z
    if observable is Observable.PHOTON_NUMBER:
        return compose(number_operator(params.fock), identity(params.spin_dim))
    if (observable is Observable.J_Z) != params.kind.is_collective:
        raise ParameterError(
            f"Observable {observable.value} does not match model {params.kind.value}",
            field="observable",
        )
    return compose(identity(params.cutoff), _atom_factor(params).z)


def exchange_operator(params: ModelParams) -> Operator:
    """i(S_+ a^p - a†^p S_-), the photon-number rate under the rotating-wave coupling"""
    atom = _atom_factor(params)
    ap = ladder_power(params.fock, params.p)
    x = compose(ap, atom.raising)
    return Operator(1j * (x.matrix - x.matrix.conj().T), hermitian=True)


def calibration_moment(params: ModelParams, field_ket: Ket) -> float:
    """Field moment the atomic-energy ratio calibrates against

    <a†^p a^p> for JC/TC and <(a†^p + a^p)^2> for Rabi/Dicke.
    """
    if params.kind.is_rotating_wave:
        return correlation_moment(field_ket, params.p)
    return quadrature_moment(field_ket, params.p)
