"""
Kernel layer for IIMP Sim

Dense complex linear algebra (hilbert) and operator/state constructors
(operators), plus the kernel exception hierarchy.
"""

from iimp_sim.kernel.exceptions import (
    KernelError,
    NumericalError,
    ShapeError,
    SizingError,
    StateError,
    TruncationError,
)
from iimp_sim.kernel.hilbert import (
    DensityMatrix,
    EigenSystem,
    Ket,
    Operator,
    commutator,
    delta_expectation,
    eigensystem,
    expectation,
    expectation_mixed,
    expm_unitary,
    fidelity_pure,
    kron,
    nested_commutator,
)
from iimp_sim.kernel.operators import (
    AtomState,
    FockCutoff,
    annihilation,
    atom_ket,
    coherent_state,
    collective_spin,
    dicke_lowest,
    fock_state,
    pauli_ops,
    quadrature,
)

__all__ = [
    "KernelError",
    "NumericalError",
    "ShapeError",
    "SizingError",
    "StateError",
    "TruncationError",
    "DensityMatrix",
    "EigenSystem",
    "Ket",
    "Operator",
    "commutator",
    "delta_expectation",
    "eigensystem",
    "expectation",
    "expectation_mixed",
    "expm_unitary",
    "fidelity_pure",
    "kron",
    "nested_commutator",
    "AtomState",
    "FockCutoff",
    "annihilation",
    "atom_ket",
    "coherent_state",
    "collective_spin",
    "dicke_lowest",
    "fock_state",
    "pauli_ops",
    "quadrature",
]
