"""
Experiment Runners for IIMP Sim

Turns a validated ExperimentConfig into model parameters and initial states,
runs the service-layer routines and writes the reports. Times in configs and
reports are in units of 1/g; internally they are converted to units of
1/omega_a.
"""

import logging
import math
from pathlib import Path
from typing import Any

import numpy as np

from iimp_sim.common.constants import NUMERIC_POLICY
from iimp_sim.common.enums import Observable
from iimp_sim.config.constants import CUTOFF_CHECK_FACTOR
from iimp_sim.kernel.hilbert import (
    DensityMatrix,
    Ket,
    density_from_ket,
    eigensystem,
    mixture,
)
from iimp_sim.kernel.operators import (
    atom_ket,
    coherent_state,
    dicke_highest,
    dicke_lowest,
    fock_state,
    product_state,
)
from iimp_sim.presentation.models import (
    AtomSpec,
    ExperimentConfig,
    FieldSpec,
    QfiSpec,
    StateSpec,
    SweepVariant,
    TimeGridSpec,
    TomographySpec,
)
from iimp_sim.presentation.service_container import ServiceContainer
from iimp_sim.services.evolution import time_grid
from iimp_sim.services.exceptions import ConvergenceError, ParameterError
from iimp_sim.services.iimp import (
    IimpResult,
    indirect_estimate,
    indirect_estimate_mixed,
    ratio_curve,
    ratio_limit_exact,
    richardson_extrapolate,
    tomography_pipeline,
)
from iimp_sim.services.models import (
    ModelParams,
    build_hamiltonian,
    calibration_moment,
    probe_observable,
)
from iimp_sim.services.output_formatter import LimitEntry
from iimp_sim.services.qfi import (
    fit_quadratic_onset,
    qfi_curve,
    qfi_indirect,
    qfi_onset_coefficient,
    qfi_pure,
    qfi_short_time_ratio,
)

_log = logging.getLogger(__name__)


# =============================================================================
# State preparation
# =============================================================================


def prepare_field(spec: FieldSpec, params: ModelParams) -> Ket:
    """Pure field ket; mixtures are handled by prepare_state"""
    if spec.kind == "fock" and spec.n is not None:
        return fock_state(spec.n, params.fock)
    if spec.kind == "coherent" and spec.alpha is not None:
        return coherent_state(spec.alpha.value, params.fock)
    raise ParameterError(f"A {spec.kind} field has no single field ket", field="field")


def prepare_atom(spec: AtomSpec, params: ModelParams) -> Ket:
    if params.kind.is_collective:
        if spec.kind == "ground":
            return dicke_lowest(params.N)
        if spec.kind == "excited":
            return dicke_highest(params.N)
        if params.N != 1:
            raise ParameterError(
                "Explicit amplitudes are only defined for a single atom", field="atom"
            )
    return atom_ket(spec.to_atom_state())


def prepare_state(spec: StateSpec, params: ModelParams) -> Ket | DensityMatrix:
    """Composite field ⊗ atom initial state"""
    atom = prepare_atom(spec.atom, params)
    if spec.field.is_mixed:
        kets = [
            product_state(fock_state(n, params.fock), atom) for n in spec.field.numbers
        ]
        return mixture(spec.field.weights, kets)
    return product_state(prepare_field(spec.field, params), atom)


def prepare_pure_state(spec: StateSpec, params: ModelParams, role: str) -> Ket:
    state = prepare_state(spec, params)
    if not isinstance(state, Ket):
        raise ParameterError(f"The {role} state must be pure", field=role)
    return state


def resolve_params(base: ModelParams, variant: SweepVariant | None) -> ModelParams:
    """Model parameters with the variant's overrides applied"""
    if variant is None:
        return base
    overrides = {
        key: getattr(variant, key)
        for key in ("kind", "p", "N", "cutoff")
        if getattr(variant, key) is not None
    }
    return ModelParams.model_validate({**base.model_dump(), **overrides})


def grid_in_model_units(grid: TimeGridSpec, params: ModelParams) -> np.ndarray:
    """Grid times (1/g) converted to 1/omega_a"""
    if params.g == 0.0:
        raise ParameterError("Times in units of 1/g need a nonzero coupling", field="g")
    return time_grid(grid.t_min, grid.t_max, grid.points, grid.spacing) / params.g


# =============================================================================
# Ratio curves
# =============================================================================


def _ratio_variant(
    config: ExperimentConfig,
    variant: SweepVariant | None,
) -> tuple[ModelParams, StateSpec, StateSpec]:
    params = resolve_params(config.model, variant)
    target = (variant.target_state if variant else None) or config.target_state
    reference = (variant.reference_state if variant else None) or config.reference_state
    if target is None or reference is None:
        raise ParameterError("Ratio curves need a target and a reference state", field="target_state")
    return params, target, reference


def _exact_ratio(params: ModelParams, target: StateSpec, reference: StateSpec, observable: Observable | None) -> float:
    h = build_hamiltonian(params)
    return ratio_limit_exact(
        h,
        probe_observable(params, observable),
        prepare_state(target, params),
        prepare_pure_state(reference, params, "reference"),
    )


def check_cutoff_convergence(
    label: str,
    params: ModelParams,
    target: StateSpec,
    reference: StateSpec,
    observable: Observable | None,
    ratio: float,
) -> float:
    """Drift of the exact ratio when the cutoff grows by CUTOFF_CHECK_FACTOR

    Raises:
        ConvergenceError: If the drift exceeds the numeric policy
    """
    larger = params.with_cutoff(math.ceil(params.cutoff * CUTOFF_CHECK_FACTOR))
    drift = abs(_exact_ratio(larger, target, reference, observable) - ratio)
    _log.info(f"{label}: cutoff {params.cutoff} -> {larger.cutoff}, drift {drift:.3e}")
    if drift > NUMERIC_POLICY.convergence_drift:
        raise ConvergenceError(
            f"{label}: ratio drifts by {drift:.3e} between cutoffs {params.cutoff} and {larger.cutoff}",
            stage=label,
            drift=drift,
        )
    return drift


def run_ratio_curves(
    config: ExperimentConfig,
    container: ServiceContainer,
    out: str | Path | None = None,
    cutoff_check: bool = False,
) -> dict[str, Any]:
    """Ratio curves and extrapolated t -> 0 limits for every sweep variant"""
    writer = container.report_writer
    directory = writer.resolve_output_dir(out or config.output_dir, "ratio-curves")
    variants: list[SweepVariant | None] = list(config.sweep) or [None]

    entries: list[LimitEntry] = []
    rows: list[dict[str, Any]] = []
    for variant in variants:
        label = variant.label if variant else "default"
        params, target_spec, reference_spec = _ratio_variant(config, variant)
        _log.info(f"Ratio curves {label}: {params.kind.value} p={params.p} N={params.N} d={params.cutoff}")

        target = prepare_state(target_spec, params)
        reference = prepare_pure_state(reference_spec, params, "reference")
        h = build_hamiltonian(params)
        eig = eigensystem(h)
        observable = probe_observable(params, config.observable)

        atomic = config.observable is not Observable.PHOTON_NUMBER
        moment = (
            calibration_moment(params, prepare_field(reference_spec.field, params))
            if atomic
            else None
        )
        times = grid_in_model_units(config.time_grid, params)
        curve = ratio_curve(
            h, observable, target, reference, times, scale=moment or 1.0, eig=eig
        )
        writer.write_curves(curve, directory / label, time_unit=params.g)

        result: IimpResult
        if isinstance(target, DensityMatrix):
            result = indirect_estimate_mixed(
                h, observable, target, density_from_ket(reference), reference_value=moment
            )
        else:
            result = indirect_estimate(h, observable, target, reference, reference_value=moment)
        entries.append(
            LimitEntry(label, result.ratio_numeric, result.ratio_exact, result.ratio_numeric_error)
        )
        row: dict[str, Any] = {
            "label": label,
            "model": params.model_dump(mode="json"),
            "scaled_limit": result.estimate,
            **result.to_dict(),
        }
        if cutoff_check:
            row["cutoff_drift"] = check_cutoff_convergence(
                label, params, target_spec, reference_spec, config.observable, result.ratio_exact
            )
        rows.append(row)

    writer.write_limits(entries, directory)
    writer.write_report({"experiment": config.experiment.value, "results": rows}, directory)
    return {"output_dir": str(directory), "results": rows, "limits": [e.to_dict() for e in entries]}


# =============================================================================
# Tomography
# =============================================================================


def run_tomography(
    config: ExperimentConfig,
    container: ServiceContainer,
    out: str | Path | None = None,
    cutoff_check: bool = False,
) -> dict[str, Any]:
    """Three-stage reconstruction of the unknown atomic state"""
    writer = container.report_writer
    directory = writer.resolve_output_dir(out or config.output_dir, "tomography")
    spec = config.tomography or TomographySpec()
    params = config.model
    references = (
        None
        if spec.reference_atoms is None
        else tuple(a.to_atom_state() for a in spec.reference_atoms)
    )
    window = time_grid(spec.window.t_min, spec.window.t_max, spec.window.points, spec.window.spacing)
    result = tomography_pipeline(
        params,
        spec.atom.to_atom_state(),
        t1=spec.t1,
        t2=spec.t2,
        alpha1=spec.alpha1.value,
        alpha2=spec.alpha2.value,
        reference_atoms=references,
        window=window,
    )

    entries: list[LimitEntry] = []
    stages: list[dict[str, Any]] = []
    for stage in result.stages:
        if stage.curve is not None:
            writer.write_curves(stage.curve, directory / stage.name, time_unit=params.g)
        entries.append(
            LimitEntry(
                stage.name,
                stage.result.ratio_numeric,
                stage.result.ratio_exact,
                stage.result.ratio_numeric_error,
            )
        )
        stages.append({"name": stage.name, "scale": stage.scale, "value": stage.value, **stage.result.to_dict()})

    if cutoff_check:
        larger = params.with_cutoff(math.ceil(params.cutoff * CUTOFF_CHECK_FACTOR))
        rerun = tomography_pipeline(
            larger,
            spec.atom.to_atom_state(),
            t1=spec.t1,
            t2=spec.t2,
            alpha1=spec.alpha1.value,
            alpha2=spec.alpha2.value,
            reference_atoms=references,
        )
        drift = float(np.max(np.abs(rerun.density_matrix - result.density_matrix)))
        if drift > NUMERIC_POLICY.convergence_drift:
            raise ConvergenceError(
                f"Reconstructed density matrix drifts by {drift:.3e} under a cutoff increase",
                stage="tomography",
                drift=drift,
            )

    rho = result.density_matrix
    writer.write_density_matrix(rho, directory)
    writer.write_limits(entries, directory)
    summary = {
        "experiment": config.experiment.value,
        "stages": stages,
        "max_abs_error": result.max_abs_error,
        "min_fidelity": result.min_fidelity,
        "trace": float(np.trace(rho).real),
        "min_eigenvalue": float(np.min(np.linalg.eigvalsh(rho))),
        "warnings": list(result.warnings),
    }
    writer.write_report(summary, directory)
    return {"output_dir": str(directory), **summary}


# =============================================================================
# QFI
# =============================================================================


def run_qfi(
    config: ExperimentConfig,
    container: ServiceContainer,
    out: str | Path | None = None,
    cutoff_check: bool = False,
) -> dict[str, Any]:
    """Direct QFI curves, onset fit, short-time ratio and indirect estimate"""
    writer = container.report_writer
    directory = writer.resolve_output_dir(out or config.output_dir, "qfi")
    spec = config.qfi or QfiSpec()
    params = config.model
    if config.target_state is None or config.reference_state is None:
        raise ParameterError("QFI needs a target and a reference state", field="target_state")
    target = prepare_pure_state(config.target_state, params, "target")
    reference = prepare_pure_state(config.reference_state, params, "reference")

    times = grid_in_model_units(config.time_grid, params)
    if times[0] > 0:
        times = np.concatenate([[0.0], times])
    target_curve = qfi_curve(params, target, times, spec.step)
    reference_curve = qfi_curve(params, reference, times, spec.step)
    writer.write_qfi_curve(target_curve, reference_curve, directory, time_unit=params.g)

    fit_times = np.linspace(spec.fit_t_min, spec.fit_t_max, spec.fit_points) / params.g
    fit = fit_quadratic_onset(fit_times, [qfi_pure(params, target, t, spec.step).F for t in fit_times])
    exact_onset = qfi_onset_coefficient(params, target)

    exact_ratio = qfi_short_time_ratio(params, target, reference)
    ladder = [spec.fit_t_max / params.g / 2**k for k in range(3)]
    ladder_ratios = [
        qfi_pure(params, target, t, spec.step).F / qfi_pure(params, reference, t, spec.step).F
        for t in ladder
    ]
    extrapolated, error = richardson_extrapolate(ladder_ratios, 2.0, 1)

    indirect = qfi_indirect(params, target, reference, spec.t0 / params.g, spec.step)
    if cutoff_check:
        larger = params.with_cutoff(math.ceil(params.cutoff * CUTOFF_CHECK_FACTOR))
        drift = abs(
            qfi_short_time_ratio(
                larger,
                prepare_pure_state(config.target_state, larger, "target"),
                prepare_pure_state(config.reference_state, larger, "reference"),
            )
            - exact_ratio
        )
        if drift > NUMERIC_POLICY.convergence_drift:
            raise ConvergenceError(
                f"QFI variance ratio drifts by {drift:.3e} under a cutoff increase",
                stage="qfi",
                drift=drift,
            )

    writer.write_limits([LimitEntry("qfi_ratio", extrapolated, exact_ratio, error)], directory)
    summary = {
        "experiment": config.experiment.value,
        "onset_fit": {
            "c2": fit.c2,
            "c4": fit.c4,
            "residual": fit.residual,
            "exact": exact_onset,
            "relative_error": abs(fit.c2 / exact_onset - 1) if exact_onset else None,
        },
        "short_time_ratio": exact_ratio,
        "indirect": {
            **indirect.to_dict(),
            "t_over_g": spec.t0,
            "indirect_over_direct": indirect.F / indirect.direct if indirect.direct else None,
        },
    }
    writer.write_report(summary, directory)
    return {"output_dir": str(directory), **summary}
