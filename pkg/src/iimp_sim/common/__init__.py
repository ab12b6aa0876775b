"""
Common Layer - Shared code across all layers

Enums, the numeric policy record and validators used by the kernel,
services and presentation layers.
"""

from iimp_sim.common.constants import FIELD_FIRST, NUMERIC_POLICY, NumericPolicy
from iimp_sim.common.enums import (
    ExperimentKind,
    GridSpacing,
    ModelKind,
    Observable,
    QfiMethod,
    Transcription,
)
from iimp_sim.common.validators import (
    validate_finite,
    validate_probability_amplitudes,
)

__all__ = [
    "FIELD_FIRST",
    "NUMERIC_POLICY",
    "NumericPolicy",
    "ExperimentKind",
    "GridSpacing",
    "ModelKind",
    "Observable",
    "QfiMethod",
    "Transcription",
    "validate_finite",
    "validate_probability_amplitudes",
]
