"""
Service Layer for IIMP Sim

Model construction, time evolution, the indirect measurement routines, the
quantum Fisher information and the report writer.
"""

from iimp_sim.services.evolution import (
    JcBlockCoefficients,
    Trajectory,
    delta_trajectory,
    delta_trajectory_mixed,
    evolve,
    jc_analytic_ket,
    jc_analytic_sigma_z_ratio,
    jc_analytic_state,
    jc_block_coefficients,
    jc_sigma_z_ratio_limit,
    time_grid,
)
from iimp_sim.services.exceptions import (
    BlockAbsentError,
    ConvergenceError,
    DegenerateReferenceError,
    OrderMismatchError,
    ParameterError,
    SimulationError,
    StepSizeError,
    UnderflowGuardError,
    UndetectableOrderError,
)
from iimp_sim.services.iimp import (
    IimpResult,
    derivative_commutator_check,
    detect_order,
    indirect_estimate,
    indirect_estimate_mixed,
    quadrature_estimate,
    ratio_limit_exact,
    ratio_limit_numeric,
    richardson_extrapolate,
    state_energy_scale,
    tomography_pipeline,
)
from iimp_sim.services.models import (
    ModelParams,
    build_hamiltonian,
    dH_dg,
    excitation_number,
    probe_observable,
)
from iimp_sim.services.output_formatter import ReportWriter
from iimp_sim.services.qfi import (
    QfiResult,
    d_lambda_state,
    fit_quadratic_onset,
    qfi_from_family,
    qfi_indirect,
    qfi_onset_coefficient,
    qfi_pure,
    qfi_short_time_ratio,
)

__all__ = [
    "JcBlockCoefficients",
    "Trajectory",
    "delta_trajectory",
    "delta_trajectory_mixed",
    "evolve",
    "jc_analytic_ket",
    "jc_analytic_sigma_z_ratio",
    "jc_analytic_state",
    "jc_block_coefficients",
    "jc_sigma_z_ratio_limit",
    "time_grid",
    "BlockAbsentError",
    "ConvergenceError",
    "DegenerateReferenceError",
    "OrderMismatchError",
    "ParameterError",
    "SimulationError",
    "StepSizeError",
    "UnderflowGuardError",
    "UndetectableOrderError",
    "IimpResult",
    "derivative_commutator_check",
    "detect_order",
    "indirect_estimate",
    "indirect_estimate_mixed",
    "quadrature_estimate",
    "ratio_limit_exact",
    "ratio_limit_numeric",
    "richardson_extrapolate",
    "state_energy_scale",
    "tomography_pipeline",
    "ModelParams",
    "build_hamiltonian",
    "dH_dg",
    "excitation_number",
    "probe_observable",
    "ReportWriter",
    "QfiResult",
    "d_lambda_state",
    "fit_quadratic_onset",
    "qfi_from_family",
    "qfi_indirect",
    "qfi_onset_coefficient",
    "qfi_pure",
    "qfi_short_time_ratio",
]
