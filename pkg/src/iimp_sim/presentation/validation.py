"""
Validation Suite for IIMP Sim

Runs the numerical invariants of every layer on small randomized and fixed
instances and reports each check with its tolerance and observed value.
"""

import logging
import math
import tempfile
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from iimp_sim.common.constants import NUMERIC_POLICY
from iimp_sim.common.enums import ModelKind, Observable, Transcription
from iimp_sim.config.constants import CUTOFF_CHECK_FACTOR, DEFAULT_COHERENT_CUTOFF
from iimp_sim.kernel.exceptions import KernelError
from iimp_sim.kernel.hilbert import (
    Ket,
    Operator,
    eigensystem,
    expm_unitary,
    fidelity_pure,
    max_abs,
    mixture,
    nested_commutators,
    unitarity_defect,
)
from iimp_sim.kernel.operators import (
    EXCITED,
    GROUND,
    AtomState,
    FockCutoff,
    annihilation,
    atom_ket,
    coherent_state,
    fock_state,
    product_state,
)
from iimp_sim.presentation.service_container import ServiceContainer
from iimp_sim.services.evolution import jc_analytic_ket, jc_analytic_state
from iimp_sim.services.exceptions import SimulationError
from iimp_sim.services.iimp import (
    derivative_commutator_check,
    indirect_estimate_mixed,
    ratio_curve,
    ratio_limit_exact,
    ratio_limit_numeric,
    tomography_pipeline,
)
from iimp_sim.services.models import ModelParams, build_hamiltonian, probe_observable
from iimp_sim.services.qfi import qfi_short_time_ratio

_log = logging.getLogger(__name__)

_Check = Callable[[np.random.Generator], tuple[float, str]]

HERMITICITY_MAX_ORDER = 4
RANDOM_SAMPLES = 20


@dataclass(frozen=True)
class ValidationCheck:
    """One invariant: passes when observed <= tolerance"""

    name: str
    tolerance: float
    observed: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "tolerance": self.tolerance,
            "observed": self.observed,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    seed: int
    transcription: Transcription
    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "transcription": self.transcription.value,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _random_hermitian(rng: np.random.Generator, dim: int) -> Operator:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Operator(0.5 * (m + m.conj().T), hermitian=True)


def _random_coefficients(rng: np.random.Generator, size: int) -> np.ndarray:
    c = rng.normal(size=size) + 1j * rng.normal(size=size)
    return c / np.linalg.norm(c)


def _jc(p: int = 1, cutoff: int = 30, **overrides: Any) -> ModelParams:
    return ModelParams(kind=ModelKind.JC, p=p, cutoff=cutoff, **overrides)


# =============================================================================
# Checks
# =============================================================================


def _unitarity(rng: np.random.Generator) -> tuple[float, str]:
    u = expm_unitary(_random_hermitian(rng, 16), 0.7)
    return unitarity_defect(u), "dim 16, t = 0.7"


def _hermiticity_closure(rng: np.random.Generator) -> tuple[float, str]:
    h = _random_hermitian(rng, 12)
    a = _random_hermitian(rng, 12)
    worst = 0.0
    for n, c in enumerate(nested_commutators(h, a, HERMITICITY_MAX_ORDER), start=1):
        m = c.matrix
        defect = max_abs(m - m.conj().T) / max(1.0, max_abs(m))
        _log.debug(f"Nested commutator order {n}: relative anti-hermitian part {defect:.3e}")
        worst = max(worst, defect)
    return worst, f"(iH)^n(A) for n <= {HERMITICITY_MAX_ORDER}, random H, A"


def _truncated_commutator(rng: np.random.Generator) -> tuple[float, str]:
    d = 10
    a = annihilation(FockCutoff(d)).matrix
    expected = np.eye(d)
    expected[-1, -1] = -(d - 1)
    return max_abs(a @ a.conj().T - a.conj().T @ a - expected), f"[a, a†] at d = {d}"


def _analytic_vs_numeric(p: int, transcription: Transcription) -> _Check:
    def check(rng: np.random.Generator) -> tuple[float, str]:
        params = _jc(p=p, cutoff=12)
        h = build_hamiltonian(params)
        eig = eigensystem(h)
        worst = 0.0
        worst_block = -1
        for _ in range(RANDOM_SAMPLES):
            c = _random_coefficients(rng, 8)
            psi0 = product_state(Ket(np.pad(c, (0, params.cutoff - 8))), atom_ket(AtomState.ground()))
            for t in np.linspace(0.0, 5.0 / params.g, 11):
                analytic = jc_analytic_ket(c, params, float(t), transcription)
                numeric = Ket.normalized(eig.evolve_vector(psi0.amplitudes, float(t)))
                defect = 1.0 - fidelity_pure(analytic, numeric)
                if defect > worst:
                    worst = defect
                    diff = np.abs(
                        analytic.amplitudes.reshape(params.cutoff, 2)
                        - numeric.amplitudes.reshape(params.cutoff, 2)
                    )
                    per_block = [
                        diff[n, GROUND] + (diff[n - p, EXCITED] if n >= p else 0.0) for n in range(8)
                    ]
                    worst_block = int(np.argmax(per_block))
        detail = f"p = {p}, {transcription.value}"
        if worst > 1e-9:
            detail += f", worst block n = {worst_block}"
        return worst, detail

    return check


def _block_unitarity(rng: np.random.Generator) -> tuple[float, str]:
    worst = 0.0
    for p in (1, 2):
        params = _jc(p=p, cutoff=12)
        c = _random_coefficients(rng, 8)
        for t in np.linspace(0.0, 5.0 / params.g, 7):
            amps = jc_analytic_state(c, params, float(t))
            norms = np.abs(amps.c_e) ** 2 + np.abs(amps.c_g) ** 2
            worst = max(worst, float(np.max(np.abs(norms - 1.0))))
    return worst, "|C_e|^2 + |C_g|^2 = 1 per block"


def _jc_ratio(rng: np.random.Generator) -> tuple[float, str]:
    params = _jc()
    ground = atom_ket(AtomState.ground())
    numeric = ratio_limit_numeric(
        build_hamiltonian(params),
        probe_observable(params),
        product_state(fock_state(6, params.fock), ground),
        product_state(fock_state(3, params.fock), ground),
    )
    return abs(numeric.ratio - 2.0), f"JC p = 1, |6> vs |3>: {numeric.ratio:.10g}"


def _rabi_ratio(rng: np.random.Generator) -> tuple[float, str]:
    params = ModelParams(kind=ModelKind.RABI, p=1, cutoff=30)
    ground = atom_ket(AtomState.ground())
    numeric = ratio_limit_numeric(
        build_hamiltonian(params),
        probe_observable(params),
        product_state(fock_state(6, params.fock), ground),
        product_state(fock_state(3, params.fock), ground),
    )
    return abs(numeric.ratio - 13 / 7), f"Rabi p = 1, |6> vs |3>: {numeric.ratio:.10g}"


def _derivative_identity(n: int) -> _Check:
    def check(rng: np.random.Generator) -> tuple[float, str]:
        params = _jc(cutoff=20)
        h = build_hamiltonian(params)
        a = probe_observable(params, Observable.PHOTON_NUMBER if n == 1 else None)
        worst = 0.0
        detail = ""
        for _ in range(RANDOM_SAMPLES):
            if n == 1:
                alpha = complex(rng.uniform(0.3, 1.0), rng.uniform(-1.0, 1.0))
                atom = AtomState.equator(float(rng.uniform(0.2, 1.3)))
                psi0 = product_state(coherent_state(alpha, params.fock), atom_ket(atom))
            else:
                psi0 = product_state(
                    fock_state(int(rng.integers(2, 8)), params.fock), atom_ket(AtomState.ground())
                )
            dt = 2e-2 / max(1.0, float(np.linalg.norm(h.apply(psi0))))
            result = derivative_commutator_check(h, a, psi0, n, dt)
            relative = result.abs_diff / max(abs(result.commutator_value), 1e-300)
            if relative >= worst:
                worst = relative
                detail = f"commutator {result.commutator_value:.6e}, fd {result.fd_value:.6e}"
        return worst, f"n = {n}, {RANDOM_SAMPLES} states, worst: {detail}"

    return check


def _mixed_estimate(rng: np.random.Generator) -> tuple[float, str]:
    params = _jc()
    ground = atom_ket(AtomState.ground())
    rho0 = mixture(
        [0.5, 0.5],
        [
            product_state(fock_state(6, params.fock), ground),
            product_state(fock_state(2, params.fock), ground),
        ],
    )
    rhor0 = mixture([1.0], [product_state(fock_state(3, params.fock), ground)])
    result = indirect_estimate_mixed(
        build_hamiltonian(params), probe_observable(params), rho0, rhor0, reference_value=3.0
    )
    return abs(result.estimate - 4.0), f"estimate {result.estimate:.10g}"


def _qfi_ratio(excited: bool, expected: float) -> _Check:
    def check(rng: np.random.Generator) -> tuple[float, str]:
        params = _jc()
        atom = atom_ket(AtomState.excited() if excited else AtomState.ground())
        ratio = qfi_short_time_ratio(
            params,
            product_state(fock_state(6, params.fock), atom),
            product_state(fock_state(3, params.fock), atom),
        )
        return abs(ratio - expected), f"ratio {ratio:.12g}"

    return check


def _csv_determinism(container: ServiceContainer) -> _Check:
    def check(rng: np.random.Generator) -> tuple[float, str]:
        params = _jc(cutoff=20)
        ground = atom_ket(AtomState.ground())
        curve = ratio_curve(
            build_hamiltonian(params),
            probe_observable(params),
            product_state(fock_state(6, params.fock), ground),
            product_state(fock_state(3, params.fock), ground),
            np.geomspace(1e-5, 1e-1, 50) / params.g,
            scale=3.0,
        )
        writer = container.report_writer
        with tempfile.TemporaryDirectory() as tmp:
            first = writer.write_curves(curve, Path(tmp) / "a", params.g).read_bytes()
            second = writer.write_curves(curve, Path(tmp) / "b", params.g).read_bytes()
        return float(first != second), f"{len(first)} bytes"

    return check


def _cutoff_convergence(cutoff: int) -> _Check:
    def check(rng: np.random.Generator) -> tuple[float, str]:
        ratios = []
        cutoffs = (cutoff, math.ceil(cutoff * CUTOFF_CHECK_FACTOR))
        for d in cutoffs:
            params = _jc(cutoff=d)
            ground = atom_ket(AtomState.ground())
            ratios.append(
                ratio_limit_exact(
                    build_hamiltonian(params),
                    probe_observable(params),
                    product_state(coherent_state(math.sqrt(6), params.fock), ground),
                    product_state(fock_state(3, params.fock), ground),
                )
            )
        drift = abs(ratios[1] - ratios[0])
        return drift, f"coherent sqrt(6), cutoff {cutoffs[0]} -> {cutoffs[1]}, drift {drift:.3e}"

    return check


def _tomography(rng: np.random.Generator) -> tuple[float, str]:
    atom = AtomState(0.6, 0.8 * complex(math.cos(math.pi / 6), math.sin(math.pi / 6)))
    result = tomography_pipeline(_jc(), atom, window=np.linspace(1e-5, 2e-3, 21))
    return result.max_abs_error, f"min fidelity {result.min_fidelity:.6f}"


# =============================================================================
# Runner
# =============================================================================


def run_validate(
    container: ServiceContainer,
    seed: int | None = None,
    transcription: Transcription = Transcription.AS_DERIVED,
    cutoff: int = DEFAULT_COHERENT_CUTOFF,
    out: str | Path | None = None,
) -> ValidationReport:
    """Run every check; a check that raises is recorded as failed"""
    seed = container.config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    suite: list[tuple[str, float, _Check]] = [
        ("unitarity", NUMERIC_POLICY.unitarity_tol, _unitarity),
        ("hermiticity_closure", NUMERIC_POLICY.hermitian_tol, _hermiticity_closure),
        ("truncated_commutator", 1e-12, _truncated_commutator),
        ("jc_block_unitarity", 1e-10, _block_unitarity),
        ("jc_analytic_vs_numeric_p1", 1e-9, _analytic_vs_numeric(1, transcription)),
        ("jc_analytic_vs_numeric_p2", 1e-9, _analytic_vs_numeric(2, transcription)),
        ("ratio_jc_p1", 1e-4, _jc_ratio),
        ("ratio_rabi_p1", 1e-3, _rabi_ratio),
        ("derivative_identity_n1", 1e-6, _derivative_identity(1)),
        ("derivative_identity_n2", 1e-6, _derivative_identity(2)),
        ("mixed_state_estimate", 1e-4, _mixed_estimate),
        ("qfi_ratio_ground", 1e-6, _qfi_ratio(False, 2.0)),
        ("qfi_ratio_excited", 1e-6, _qfi_ratio(True, 1.75)),
        ("csv_determinism", 0.0, _csv_determinism(container)),
        ("cutoff_convergence", NUMERIC_POLICY.convergence_drift, _cutoff_convergence(cutoff)),
        ("tomography", 5e-3, _tomography),
    ]
    report = ValidationReport(seed=seed, transcription=transcription)
    for name, tolerance, check in suite:
        try:
            observed, detail = check(rng)
            passed = observed <= tolerance
        except (KernelError, SimulationError) as e:
            observed, detail, passed = math.inf, f"{type(e).__name__}: {e}", False
        level = logging.INFO if passed else logging.WARNING
        _log.log(level, f"{name}: observed {observed:.3e} (tolerance {tolerance:.1e}) {detail}")
        report.checks.append(ValidationCheck(name, tolerance, observed, passed, detail))

    directory = container.report_writer.resolve_output_dir(out, "validate")
    container.report_writer.write_json(report.to_dict(), directory / "validate.json")
    return report
