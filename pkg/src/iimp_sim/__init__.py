"""
IIMP Sim

Simulator for instantaneous indirect measurement in cavity QED: a property of
an unknown quantum state is read off from the short-time ratio of its
observable change to that of a calibrated reference state, evolving under
Rabi, Jaynes-Cummings, Dicke or Tavis-Cummings Hamiltonians with p-photon
coupling, Kerr and dispersive terms.

Architecture (layered, with a Composition Root):

Core Layers (unidirectional dependencies: Presentation → Services → Kernel → Config → Common):
- Layer 0: Common - Numeric policy, enums and validators used across all layers
- Layer 1: Configuration - Runtime settings from the environment and shared defaults
- Layer 2: Kernel - Dense Hilbert-space linear algebra, operators and states
- Layer 3: Services - Models, time evolution, indirect measurement, QFI and reports
- Layer 4: Presentation - Experiment configs, runners and the validation suite

Composition Root:
- Bootstrap Module - Builds the ServiceContainer from the runtime configuration.
  It is the only module that wires the layers together.

Installation:
    pip install -e .

CLI Usage:
    iimp tomography --config configs/tomography.json
    iimp ratio-curves --config configs/jc_fock_vs_coherent.json --cutoff-check
    iimp qfi --config configs/qfi_jc.json
    iimp validate --seed 7
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("iimp-sim")
except PackageNotFoundError:
    __version__ = "0.0.0.dev"

__description__ = "Instantaneous indirect measurement simulator"

from .common import ModelKind, Observable, Transcription
from .config import RuntimeConfig, get_runtime_config
from .kernel import Ket, Operator
from .services import (
    IimpResult,
    ModelParams,
    QfiResult,
    build_hamiltonian,
    indirect_estimate,
    probe_observable,
    qfi_pure,
    ratio_limit_exact,
    ratio_limit_numeric,
    tomography_pipeline,
)
from .presentation import ExperimentConfig, ServiceContainer

__all__ = [
    "ModelKind",
    "Observable",
    "Transcription",
    "RuntimeConfig",
    "get_runtime_config",
    "Ket",
    "Operator",
    "IimpResult",
    "ModelParams",
    "QfiResult",
    "build_hamiltonian",
    "indirect_estimate",
    "probe_observable",
    "qfi_pure",
    "ratio_limit_exact",
    "ratio_limit_numeric",
    "tomography_pipeline",
    "ExperimentConfig",
    "ServiceContainer",
]
