"""
Quantum Fisher Information Service for IIMP Sim

Pure-state QFI of the evolved state with respect to the coupling g:

    F(t) = 4 [<dPsi|dPsi> - |<Psi|dPsi>|^2],  |dPsi> = d/dg exp(-iH(g)t)|Psi(0)>

The g-derivative is a central finite difference with the two displaced states
phase-aligned to the undisplaced one. For short times
F(t) = 4 Var(dH/dg) t^2 + O(t^4), so the ratio of two QFIs tends to the ratio
of the dH/dg variances, which an atomic-energy change ratio also measures.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from iimp_sim.common.constants import NUMERIC_POLICY
from iimp_sim.common.enums import QfiMethod
from iimp_sim.kernel.hilbert import Ket, Operator, delta_expectation, eigensystem, expectation
from iimp_sim.services.evolution import evolve
from iimp_sim.services.exceptions import (
    DegenerateReferenceError,
    ParameterError,
    StepSizeError,
)
from iimp_sim.services.iimp import state_energy_scale
from iimp_sim.services.models import ModelParams, build_hamiltonian, dH_dg, probe_observable

_log = logging.getLogger(__name__)

SUPPORTED_PARAMETERS = ("g",)


@dataclass(frozen=True)
class QfiResult:
    """QFI of one parameter at one time"""

    lambda_name: str
    t: float
    F: float
    method: QfiMethod
    direct: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lambda_name,
            "t": self.t,
            "F": self.F,
            "method": self.method.value,
            "direct": self.direct,
        }


@dataclass(frozen=True)
class OnsetFit:
    """Least-squares F(t) ~ c2 t^2 + c4 t^4"""

    c2: float
    c4: float
    residual: float


def _check_parameter(lam: str) -> None:
    if lam not in SUPPORTED_PARAMETERS:
        raise ParameterError(f"QFI is only available for lambda = g, got {lam!r}", field="lambda")


def default_step(g: float) -> float:
    return NUMERIC_POLICY.qfi_step_factor * max(1.0, abs(g))


def _aligned(reference: NDArray[np.complex128], vector: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """vector times the phase making <reference|vector> real-positive"""
    overlap = np.vdot(reference, vector)
    if overlap == 0:
        return vector
    result: NDArray[np.complex128] = vector * (overlap.conjugate() / abs(overlap))
    return result


def _family_derivative(
    hamiltonian_of: Callable[[float], Operator],
    lam: float,
    psi0: Ket,
    t: float,
    h: float,
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    psi = evolve(hamiltonian_of(lam), psi0, t).amplitudes
    plus = _aligned(psi, evolve(hamiltonian_of(lam + h), psi0, t).amplitudes)
    minus = _aligned(psi, evolve(hamiltonian_of(lam - h), psi0, t).amplitudes)
    return psi, (plus - minus) / (2 * h)


def _fisher(psi: NDArray[np.complex128], derivative: NDArray[np.complex128]) -> float:
    return float(4 * (np.vdot(derivative, derivative).real - abs(np.vdot(psi, derivative)) ** 2))


def qfi_from_family(
    hamiltonian_of: Callable[[float], Operator],
    lam: float,
    psi0: Ket,
    t: float,
    h: float | None = None,
) -> float:
    """Pure-state QFI of exp(-iH(lam)t)|psi0> for any one-parameter family H(lam)"""
    h = default_step(lam) if h is None else h
    if not h > 0:
        raise StepSizeError(f"Step must be positive, got {h}", step=h)
    if t == 0.0:
        return 0.0
    return _fisher(*_family_derivative(hamiltonian_of, lam, psi0, t, h))


def d_lambda_state(
    params: ModelParams,
    psi0: Ket,
    t: float,
    h: float | None = None,
    lam: str = "g",
    check_step: bool = True,
) -> NDArray[np.complex128]:
    """Central difference (|Psi_{g+h}(t)> - |Psi_{g-h}(t)>) / 2h, unnormalized

    Raises:
        StepSizeError: If halving h changes the result by more than 10 h^2 times its scale
    """
    _check_parameter(lam)
    h = default_step(params.g) if h is None else h
    if not h > 0:
        raise StepSizeError(f"Step must be positive, got {h}", step=h)
    if t == 0.0:
        return np.zeros(psi0.dim, dtype=np.complex128)

    def family(g: float) -> Operator:
        return build_hamiltonian(params.with_coupling(g))

    _, derivative = _family_derivative(family, params.g, psi0, t, h)
    if check_step:
        _, half = _family_derivative(family, params.g, psi0, t, h / 2)
        change = float(np.linalg.norm(derivative - half))
        v_norm = float(np.linalg.norm(dH_dg(params).matrix, 2))
        scale = max(1.0, float(np.linalg.norm(derivative))) * max(1.0, t * v_norm) ** 2
        if change > 10 * h**2 * scale:
            raise StepSizeError(
                f"Halving h = {h:.3e} changed d|Psi>/dg by {change:.3e}",
                step=h,
                change=change,
            )
    return derivative


def qfi_pure(
    params: ModelParams,
    psi0: Ket,
    t: float,
    h: float | None = None,
    lam: str = "g",
) -> QfiResult:
    """F = 4[<dPsi|dPsi> - |<Psi|dPsi>|^2] at time t"""
    _check_parameter(lam)
    if t == 0.0:
        return QfiResult(lambda_name=lam, t=t, F=0.0, method=QfiMethod.FINITE_DIFFERENCE)
    derivative = d_lambda_state(params, psi0, t, h, lam)
    psi = evolve(build_hamiltonian(params), psi0, t).amplitudes
    value = _fisher(psi, derivative)
    if value < -NUMERIC_POLICY.qfi_negativity_tol:
        raise StepSizeError(f"Finite-difference QFI is negative ({value:.3e}) at t = {t}", step=h)
    return QfiResult(lambda_name=lam, t=t, F=value, method=QfiMethod.FINITE_DIFFERENCE)


def qfi_curve(
    params: ModelParams,
    psi0: Ket,
    times: ArrayLike,
    h: float | None = None,
) -> list[QfiResult]:
    """qfi_pure on every time of a grid"""
    return [qfi_pure(params, psi0, float(t), h) for t in np.asarray(times, dtype=np.float64)]


def _variance(psi0: Ket, v: Operator) -> float:
    mean = expectation(psi0, v)
    second = expectation(psi0, v @ v).real
    return second - mean.real**2 + mean.imag**2


def qfi_onset_coefficient(params: ModelParams, psi0: Ket) -> float:
    """4[<V^2> - (Re<V>)^2 + (Im<V>)^2] with V = dH/dg; the t^2 coefficient of F"""
    return 4 * _variance(psi0, dH_dg(params))


def qfi_short_time_ratio(params: ModelParams, psi0: Ket, psir0: Ket) -> float:
    """Var_psi0(dH/dg) / Var_psir0(dH/dg)

    Raises:
        DegenerateReferenceError: If the reference variance vanishes
    """
    v = dH_dg(params)
    reference = _variance(psir0, v)
    if abs(reference) < NUMERIC_POLICY.reference_tol:
        raise DegenerateReferenceError(
            "Reference variance of dH/dg vanishes", stage="qfi_short_time_ratio"
        )
    return _variance(psi0, v) / reference


def qfi_indirect(
    params: ModelParams,
    psi0: Ket,
    psir0: Ket,
    t0: float,
    h: float | None = None,
    lam: str = "g",
) -> QfiResult:
    """Reference QFI at t0 times the atomic-energy change ratio at t0

    The direct target QFI is attached for cross-checking.
    """
    _check_parameter(lam)
    h_op = build_hamiltonian(params)
    energy = state_energy_scale(h_op, psi0, psir0)
    if not (t0 > 0 and math.isfinite(t0)) or t0 * energy > NUMERIC_POLICY.t0_norm_limit:
        raise ParameterError(
            f"t0 = {t0:.3e} violates 0 < t0 * {energy:.3e} <= {NUMERIC_POLICY.t0_norm_limit}",
            field="t0",
        )
    eig = eigensystem(h_op)
    observable = probe_observable(params)
    delta_reference = delta_expectation(eig, psir0, observable, t0)
    if delta_reference == 0.0:
        raise DegenerateReferenceError(
            f"Reference atomic-energy change vanishes at t0 = {t0}", stage="qfi_indirect"
        )
    ratio = delta_expectation(eig, psi0, observable, t0) / delta_reference
    reference_qfi = qfi_pure(params, psir0, t0, h, lam).F
    direct = qfi_pure(params, psi0, t0, h, lam).F
    estimate = reference_qfi * ratio
    if direct != 0.0 and abs(estimate / direct - 1) > 1e-2:
        _log.warning(f"Indirect QFI {estimate:.6g} deviates from direct {direct:.6g} by over 1%")
    return QfiResult(lambda_name=lam, t=t0, F=estimate, method=QfiMethod.INDIRECT, direct=direct)


def fit_quadratic_onset(times: ArrayLike, values: ArrayLike, quartic: bool = True) -> OnsetFit:
    """Least-squares fit of F(t) by c2 t^2 (+ c4 t^4)"""
    t = np.asarray(times, dtype=np.float64).ravel()
    f = np.asarray(values, dtype=np.float64).ravel()
    if t.size != f.size or t.size < (2 if quartic else 1):
        raise ParameterError("Onset fit needs matching times and values", field="times")
    t_max = float(np.max(np.abs(t)))
    if t_max == 0.0:
        raise ParameterError("Onset fit needs a nonzero time", field="times")
    s = t / t_max
    design = np.column_stack([s**2, s**4] if quartic else [s**2])
    coeffs, *_ = np.linalg.lstsq(design, f, rcond=None)
    residual = float(np.linalg.norm(design @ coeffs - f))
    c2 = float(coeffs[0]) / t_max**2
    c4 = float(coeffs[1]) / t_max**4 if quartic else 0.0
    _log.debug(f"Onset fit c2={c2:.10g} c4={c4:.4g} residual={residual:.3e}")
    return OnsetFit(c2=c2, c4=c4, residual=residual)


def onset_law_ratio(params: ModelParams, psi0: Ket, t: float) -> float:
    """F(t) / (4 Var(dH/dg) t^2); tends to 1 as t -> 0"""
    coefficient = qfi_onset_coefficient(params, psi0)
    if coefficient == 0.0 or t == 0.0:
        return math.nan
    return qfi_pure(params, psi0, t).F / (coefficient * t**2)
