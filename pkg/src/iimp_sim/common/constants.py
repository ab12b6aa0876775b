"""
Common Constants for IIMP Sim

Numeric policy shared by the library and the test-suite. Every tolerance
used anywhere in the package is read from ``NUMERIC_POLICY`` so the
library and its checks can never drift apart.
"""

from dataclasses import dataclass

import numpy as np

# =============================================================================
# Composite ordering
# =============================================================================

FIELD_FIRST = True
"""Composite spaces are ordered field ⊗ atom; every embedding routes through this"""

# =============================================================================
# Numeric Policy
# =============================================================================


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances for the numerical kernel and the IIMP routines.

    All comparisons of complex matrices use the max-abs entrywise norm.
    """

    hermitian_tol: float = 1e-12
    ket_norm_tol: float = 1e-10
    trace_tol: float = 1e-10
    positivity_tol: float = 1e-10
    unitarity_tol: float = 1e-10
    atom_norm_tol: float = 1e-12
    expectation_imag_tol: float = 1e-12

    coherent_warn_deficit: float = 1e-8
    coherent_error_deficit: float = 1e-4

    order_epsilon: float = 1e-9
    default_max_order: int = 4
    ratio_floor: float = 1e-6
    underflow_factor: float = 100.0
    default_levels: int = 6
    t0_scale: float = 1e-2
    t0_norm_limit: float = 0.5

    reference_tol: float = 1e-12
    qfi_negativity_tol: float = 1e-8
    qfi_step_factor: float = 1e-5
    convergence_drift: float = 1e-6

    @property
    def machine_epsilon(self) -> float:
        """Double precision unit roundoff"""
        return float(np.finfo(float).eps)


NUMERIC_POLICY = NumericPolicy()
"""Process-wide numeric policy instance"""

__all__ = ["FIELD_FIRST", "NumericPolicy", "NUMERIC_POLICY"]
