"""
Presentation Layer for IIMP Sim

Experiment configuration models, the experiment runners and the validation
suite behind the command-line interface.
"""

from iimp_sim.presentation.experiments import run_qfi, run_ratio_curves, run_tomography
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
from iimp_sim.presentation.validation import ValidationCheck, ValidationReport, run_validate

__all__ = [
    "run_qfi",
    "run_ratio_curves",
    "run_tomography",
    "AtomSpec",
    "ExperimentConfig",
    "FieldSpec",
    "QfiSpec",
    "StateSpec",
    "SweepVariant",
    "TimeGridSpec",
    "TomographySpec",
    "ServiceContainer",
    "ValidationCheck",
    "ValidationReport",
    "run_validate",
]
