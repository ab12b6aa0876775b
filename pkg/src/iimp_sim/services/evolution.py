"""
Evolution Service for IIMP Sim

Numeric unitary propagation, expectation-change trajectories and the
closed-form p-photon Jaynes-Cummings solution for a ground-state atom.

The JC block couples |e, n-p> and |g, n>:

    [[A, B],
     [B, D]]

with eigenphases x1 <= x2. Starting from |g, n>:

    C_e(t) = z1 (e^{-i x2 t} - e^{-i x1 t})
    C_g(t) = y1 e^{-i x1 t} - y2 e^{-i x2 t}
"""

import cmath
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from iimp_sim.common.constants import NUMERIC_POLICY
from iimp_sim.common.enums import GridSpacing, ModelKind, Transcription
from iimp_sim.kernel.exceptions import ShapeError
from iimp_sim.kernel.hilbert import (
    DensityMatrix,
    EigenSystem,
    Ket,
    Operator,
    change_evaluator,
    eigensystem,
)
from iimp_sim.kernel.operators import EXCITED, GROUND
from iimp_sim.services.exceptions import (
    BlockAbsentError,
    DegenerateReferenceError,
    ParameterError,
)
from iimp_sim.services.models import ModelParams, check_params

_log = logging.getLogger(__name__)


# =============================================================================
# Trajectories
# =============================================================================


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Delta<A>(t) sampled on a time grid"""

    times: NDArray[np.float64]
    values: NDArray[np.float64]
    label: str
    initial_mean: float

    def __len__(self) -> int:
        return int(self.times.size)

    def rescaled_times(self, factor: float) -> NDArray[np.float64]:
        """Times multiplied by a unit factor (e.g. g for g^-1 axes)"""
        result: NDArray[np.float64] = self.times * factor
        return result


def time_grid(
    t_min: float,
    t_max: float,
    points: int,
    spacing: GridSpacing = GridSpacing.LINEAR,
) -> NDArray[np.float64]:
    """Ascending sample times; log spacing requires t_min > 0"""
    if points < 1:
        raise ParameterError(f"Time grid needs at least one point, got {points}", field="points")
    if not (math.isfinite(t_min) and math.isfinite(t_max)) or t_min < 0 or t_max < t_min:
        raise ParameterError(
            f"Time grid bounds must satisfy 0 <= t_min <= t_max, got [{t_min}, {t_max}]",
            field="t_min",
        )
    if spacing is GridSpacing.LOG:
        if t_min <= 0:
            raise ParameterError("Log-spaced grid requires t_min > 0", field="t_min")
        return np.geomspace(t_min, t_max, points)
    return np.linspace(t_min, t_max, points)


def _check_times(times: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(times, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ParameterError("Trajectory needs at least one time", field="times")
    if arr[0] < 0 or np.any(np.diff(arr) < 0) or not np.all(np.isfinite(arr)):
        raise ParameterError("Times must be finite, ascending and non-negative", field="times")
    return arr


def evolve(h: Operator, psi0: Ket, t: float, eig: EigenSystem | None = None) -> Ket:
    """|psi(t)> = exp(-iHt)|psi(0)>"""
    if h.dim != psi0.dim:
        raise ShapeError(
            f"evolve: H has dimension {h.dim}, state has {psi0.dim}",
            operation="evolve",
            shapes=((h.dim, h.dim), (psi0.dim,)),
        )
    if t == 0.0:
        return psi0
    eig = eig or eigensystem(h)
    return Ket.normalized(eig.evolve_vector(psi0.amplitudes, t))


def delta_trajectory(
    h: Operator,
    psi0: Ket,
    a: Operator,
    times: ArrayLike,
    label: str = "A",
    eig: EigenSystem | None = None,
) -> Trajectory:
    """<psi(t)|A|psi(t)> - <psi(0)|A|psi(0)> from one eigendecomposition of H"""
    arr = _check_times(times)
    evaluator = change_evaluator(eig or eigensystem(h), psi0, a)
    return Trajectory(
        times=arr,
        values=evaluator.values(arr),
        label=label,
        initial_mean=evaluator.initial_mean,
    )


def delta_trajectory_mixed(
    h: Operator,
    rho0: DensityMatrix,
    a: Operator,
    times: ArrayLike,
    label: str = "A",
    eig: EigenSystem | None = None,
) -> Trajectory:
    """Tr[rho(t) A] - Tr[rho(0) A]"""
    arr = _check_times(times)
    evaluator = change_evaluator(eig or eigensystem(h), rho0, a)
    return Trajectory(
        times=arr,
        values=evaluator.values(arr),
        label=label,
        initial_mean=evaluator.initial_mean,
    )


# =============================================================================
# Closed-form p-photon JC
# =============================================================================


@dataclass(frozen=True)
class JcBlockCoefficients:
    """2x2 block entries, eigenphases and amplitude weights for excitation index n"""

    n: int
    A: float
    B: float
    D: float
    x1: float
    x2: float
    y1: float
    y2: float
    z1: float

    @property
    def degenerate(self) -> bool:
        return self.x1 == self.x2


@dataclass(frozen=True, eq=False)
class JcAmplitudes:
    """Per-block amplitudes C_e[n] (on |e, n-p>) and C_g[n] (on |g, n>)"""

    c_e: NDArray[np.complex128]
    c_g: NDArray[np.complex128]


def _require_jc(params: ModelParams) -> None:
    check_params(params)
    if params.kind is not ModelKind.JC:
        raise ParameterError(
            f"Closed-form solution exists only for JC, got {params.kind.value}", field="kind"
        )


def _ground_diagonal(n: int, params: ModelParams, transcription: Transcription) -> float:
    """<g, n|H|g, n>"""
    kerr = 0.5 * params.U * n * (n - 1)
    if transcription is Transcription.AS_PRINTED:
        kerr = -kerr
    return -params.omega_0 / 2 + params.omega_a * n + kerr - params.gamma * n


def jc_block_coefficients(
    n: int,
    params: ModelParams,
    transcription: Transcription = Transcription.AS_DERIVED,
) -> JcBlockCoefficients:
    """Block entries for {|e, n-p>, |g, n>}

    Raises:
        BlockAbsentError: If n < p; |g, n> then only acquires a phase
    """
    _require_jc(params)
    p = params.p
    if n < p:
        raise BlockAbsentError(f"No JC block for n = {n} < p = {p}", n=n, p=p)
    m = n - p
    a_entry = (
        params.omega_0 / 2
        + params.omega_a * m
        + 0.5 * params.U * m * (m - 1)
        + params.gamma * m
    )
    b_entry = params.g * math.sqrt(math.perm(n, p))
    d_entry = _ground_diagonal(n, params, transcription)

    split = math.hypot(a_entry - d_entry, 2 * b_entry)
    x1 = 0.5 * ((a_entry + d_entry) - split)
    x2 = 0.5 * ((a_entry + d_entry) + split)
    if split == 0.0:
        y1, y2, z1 = 1.0, 0.0, 0.0
    else:
        y1 = (a_entry - x1) / split
        y2 = (a_entry - x2) / split
        z1 = b_entry / split
    return JcBlockCoefficients(
        n=n, A=a_entry, B=b_entry, D=d_entry, x1=x1, x2=x2, y1=y1, y2=y2, z1=z1
    )


def _coefficients(c: Sequence[complex] | ArrayLike, name: str) -> NDArray[np.complex128]:
    arr = np.asarray(c, dtype=np.complex128).ravel()
    norm = float(np.linalg.norm(arr))
    if arr.size == 0 or abs(norm - 1.0) > NUMERIC_POLICY.ket_norm_tol:
        raise ParameterError(
            f"{name} coefficients must be normalized, got norm {norm:.12g}", field=name
        )
    return arr


def jc_analytic_state(
    c: Sequence[complex] | ArrayLike,
    params: ModelParams,
    t: float,
    transcription: Transcription = Transcription.AS_DERIVED,
) -> JcAmplitudes:
    """Block amplitudes for a field sum_n c_n|n> with the atom in |g>"""
    _require_jc(params)
    size = _coefficients(c, "c").size
    c_e = np.zeros(size, dtype=np.complex128)
    c_g = np.ones(size, dtype=np.complex128)
    if t == 0.0:
        return JcAmplitudes(c_e=c_e, c_g=c_g)
    for n in range(size):
        if n < params.p:
            c_g[n] = cmath.exp(-1j * _ground_diagonal(n, params, transcription) * t)
            continue
        block = jc_block_coefficients(n, params, transcription)
        if block.degenerate:
            c_g[n] = cmath.exp(-1j * block.D * t)
            continue
        e1 = cmath.exp(-1j * block.x1 * t)
        e2 = cmath.exp(-1j * block.x2 * t)
        c_e[n] = block.z1 * (e2 - e1)
        c_g[n] = block.y1 * e1 - block.y2 * e2
    return JcAmplitudes(c_e=c_e, c_g=c_g)


def jc_analytic_ket(
    c: Sequence[complex] | ArrayLike,
    params: ModelParams,
    t: float,
    transcription: Transcription = Transcription.AS_DERIVED,
) -> Ket:
    """Composite field ⊗ atom state assembled from the block amplitudes"""
    coeffs = _coefficients(c, "c")
    if coeffs.size > params.cutoff:
        raise ShapeError(
            f"{coeffs.size} field coefficients exceed cutoff {params.cutoff}",
            operation="jc_analytic_ket",
        )
    amps = jc_analytic_state(coeffs, params, t, transcription)
    state = np.zeros((params.cutoff, 2), dtype=np.complex128)
    for n, c_n in enumerate(coeffs):
        state[n, GROUND] += c_n * amps.c_g[n]
        if n >= params.p:
            state[n - params.p, EXCITED] += c_n * amps.c_e[n]
    return Ket.normalized(state.ravel())


def _excited_populations(
    coeffs: NDArray[np.complex128], params: ModelParams, t: float, transcription: Transcription
) -> float:
    """sum_n |c_n|^2 |C_e^n(t)|^2 with |C_e|^2 = 4 z1^2 sin^2((x2 - x1) t / 2)"""
    total = 0.0
    for n in range(params.p, coeffs.size):
        weight = abs(coeffs[n]) ** 2
        if weight == 0.0:
            continue
        block = jc_block_coefficients(n, params, transcription)
        total += weight * 4 * block.z1**2 * math.sin(0.5 * (block.x2 - block.x1) * t) ** 2
    return total


def jc_sigma_z_ratio_limit(
    c: Sequence[complex] | ArrayLike,
    d: Sequence[complex] | ArrayLike,
    p: int,
) -> float:
    """sum |c_n|^2 n!/(n-p)! over sum |d_m|^2 m!/(m-p)!

    Raises:
        DegenerateReferenceError: If every d_m with m >= p vanishes
    """
    target = _coefficients(c, "c")
    reference = _coefficients(d, "d")

    def moment(coeffs: NDArray[np.complex128]) -> float:
        return float(
            sum(abs(coeffs[n]) ** 2 * math.perm(n, p) for n in range(p, coeffs.size))
        )

    denominator = moment(reference)
    if denominator == 0.0:
        raise DegenerateReferenceError(
            f"Reference field has no weight on n >= p = {p}", stage="jc_sigma_z_ratio_limit"
        )
    return moment(target) / denominator


def jc_analytic_sigma_z_ratio(
    c: Sequence[complex] | ArrayLike,
    d: Sequence[complex] | ArrayLike,
    params: ModelParams,
    t: float,
    transcription: Transcription = Transcription.AS_DERIVED,
) -> float:
    """Delta<sigma_z> ratio of two ground-atom JC states at time t

    Delta<sigma_z> = 2 sum_n |c_n|^2 |C_e^n(t)|^2, so the ratio never suffers
    the cancellation of (<sigma_z>(t) + 1) at small t. At t = 0 the limit is
    returned.
    """
    _require_jc(params)
    target = _coefficients(c, "c")
    reference = _coefficients(d, "d")
    if t == 0.0:
        return jc_sigma_z_ratio_limit(target, reference, params.p)
    denominator = _excited_populations(reference, params, t, transcription)
    if denominator == 0.0:
        raise DegenerateReferenceError(
            f"Reference Delta<sigma_z> vanishes at t = {t}", stage="jc_analytic_sigma_z_ratio"
        )
    return _excited_populations(target, params, t, transcription) / denominator
