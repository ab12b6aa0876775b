"""
Constants for IIMP Sim

Centralized defaults for the runtime configuration, the model parameters and
the shipped experiments.
"""

# =============================================================================
# Runtime Configuration Constants
# =============================================================================

DEFAULT_MAX_DIM = 4096
"""Largest composite Hilbert-space dimension a dense operator may have"""

DEFAULT_OUTPUT_DIR = "results"
"""Default directory for experiment reports"""

DEFAULT_LOG_LEVEL = "INFO"
"""Default logging level"""

DEFAULT_SEED = 12345
"""Default seed for randomized validation instances"""

# =============================================================================
# Model Parameter Defaults
# =============================================================================

DEFAULT_OMEGA_A = 1.0
"""Cavity frequency; all frequencies are in units of omega_a"""

DEFAULT_OMEGA_0 = 1.0
"""Atomic transition frequency (resonant)"""

DEFAULT_KERR = 0.1
"""Kerr strength U"""

DEFAULT_DISPERSIVE = 0.2
"""Dispersive coupling gamma"""

DEFAULT_COUPLING = 0.05
"""Dipole coupling g; ratio limits do not depend on it, finite-time curves use g-scaled time"""

# =============================================================================
# Fock Cutoffs
# =============================================================================

DEFAULT_NUMBER_CUTOFF = 30
"""Cutoff for number-state experiments"""

DEFAULT_COHERENT_CUTOFF = 60
"""Cutoff for coherent |alpha=sqrt(6)> experiments"""

DEFAULT_COLLECTIVE_CUTOFF = 40
"""Cutoff for the N=10 Dicke/TC cross-model runs"""

CUTOFF_CHECK_FACTOR = 1.5
"""Convergence re-run factor"""

# =============================================================================
# Trajectory Grids (units of 1/g)
# =============================================================================

DEFAULT_LIMIT_T_MIN = 1e-5
DEFAULT_LIMIT_T_MAX = 1e-1
DEFAULT_LIMIT_POINTS = 400

# =============================================================================
# Tomography
# =============================================================================

TOMOGRAPHY_T1 = 0.001
"""Stage-1 pre-evolution time in units of 1/g"""

TOMOGRAPHY_T2 = 0.002
"""Stage-2 pre-evolution time in units of 1/g"""

TOMOGRAPHY_STAGE1_SCALE = -0.5
"""Prefactor recovering Re(rho_eg) with the |alpha=i> probe field"""

TOMOGRAPHY_STAGE2_SCALE = 0.5
"""Prefactor recovering Im(rho_eg) with the |alpha=1> probe field"""

TOMOGRAPHY_FIDELITY_WINDOW = 2e-3
"""Measurement window (1/g) over which non-disturbance is asserted"""

# =============================================================================
# CSV Output
# =============================================================================

CSV_FLOAT_FORMAT = "%.17g"
"""Fixed float formatting for byte-identical reports"""

CSV_COLUMNS = (
    "t",
    "delta_target",
    "delta_reference",
    "ratio",
    "scaled_ratio",
    "fidelity",
)
"""Column order of curves.csv"""

LIMIT_TOLERANCE = 1e-4
"""Largest accepted |extrapolated - exact| in limits.json"""

__all__ = [
    "DEFAULT_MAX_DIM",
    "DEFAULT_OUTPUT_DIR",
    "DEFAULT_LOG_LEVEL",
    "DEFAULT_SEED",
    "DEFAULT_OMEGA_A",
    "DEFAULT_OMEGA_0",
    "DEFAULT_KERR",
    "DEFAULT_DISPERSIVE",
    "DEFAULT_COUPLING",
    "DEFAULT_NUMBER_CUTOFF",
    "DEFAULT_COHERENT_CUTOFF",
    "DEFAULT_COLLECTIVE_CUTOFF",
    "CUTOFF_CHECK_FACTOR",
    "DEFAULT_LIMIT_T_MIN",
    "DEFAULT_LIMIT_T_MAX",
    "DEFAULT_LIMIT_POINTS",
    "TOMOGRAPHY_T1",
    "TOMOGRAPHY_T2",
    "TOMOGRAPHY_STAGE1_SCALE",
    "TOMOGRAPHY_STAGE2_SCALE",
    "TOMOGRAPHY_FIDELITY_WINDOW",
    "CSV_FLOAT_FORMAT",
    "CSV_COLUMNS",
    "LIMIT_TOLERANCE",
]
