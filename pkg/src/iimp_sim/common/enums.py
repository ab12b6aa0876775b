"""
Common Enums for IIMP Sim

Shared enumerations used across multiple layers.
"""

from enum import Enum


class ModelKind(str, Enum):
    """Light-matter Hamiltonian family"""

    RABI = "Rabi"
    JC = "JC"
    DICKE = "Dicke"
    TC = "TC"

    @property
    def is_collective(self) -> bool:
        """True for the N-atom models built on the symmetric Dicke manifold"""
        return self in (ModelKind.DICKE, ModelKind.TC)

    @property
    def is_rotating_wave(self) -> bool:
        """True for the excitation-conserving (rotating-wave) couplings"""
        return self in (ModelKind.JC, ModelKind.TC)


class Observable(str, Enum):
    """Directly measured probe observable"""

    SIGMA_Z = "sigma_z"
    PHOTON_NUMBER = "photon_number"
    J_Z = "J_z"


class ExperimentKind(str, Enum):
    """CLI experiment selector"""

    TOMOGRAPHY = "tomography"
    RATIO_CURVES = "ratio-curves"
    QFI = "qfi"
    VALIDATE = "validate"


class GridSpacing(str, Enum):
    """Time grid spacing"""

    LINEAR = "linear"
    LOG = "log"


class Transcription(str, Enum):
    """Which form of the JC block diagonal entry D is used"""

    AS_DERIVED = "as-derived"
    AS_PRINTED = "as-printed"


class QfiMethod(str, Enum):
    """How a QFI value was obtained"""

    FINITE_DIFFERENCE = "finite-difference"
    SHORT_TIME_LIMIT = "short-time-limit"
    INDIRECT = "indirect"
