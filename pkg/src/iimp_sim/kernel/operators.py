"""
Operator and State Constructors for IIMP Sim

Bosonic ladder operators on a truncated Fock space, Pauli and collective
spin operators, field quadratures, and the initial states the experiments
use (number, coherent, two-level atom, lowest-weight Dicke).

Conventions:
    - Single atom basis order is (|e>, |g>) so that sigma_z|e> = +|e>.
    - Collective spin basis index k holds |j, m = j - k>, so N = 1 coincides
      with the single-atom basis and J_z = sigma_z / 2.
    - Composite spaces are field ⊗ atom (see hilbert.compose).
"""

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from iimp_sim.common.constants import NUMERIC_POLICY
from iimp_sim.common.validators import validate_probability_amplitudes
from iimp_sim.kernel.exceptions import ShapeError, StateError, TruncationError
from iimp_sim.kernel.hilbert import (
    Ket,
    Operator,
    compose,
    compose_kets,
    identity,
)

_log = logging.getLogger(__name__)

EXCITED = 0
"""Index of |e> in the single-atom basis"""

GROUND = 1
"""Index of |g> in the single-atom basis"""


@dataclass(frozen=True)
class FockCutoff:
    """Fock basis {|0>, ..., |d-1>}"""

    d: int

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ShapeError(f"Fock cutoff must be >= 2, got {self.d}", operation="FockCutoff")

    def scaled(self, factor: float) -> "FockCutoff":
        """Cutoff enlarged by a factor (convergence re-runs)"""
        return FockCutoff(int(math.ceil(self.d * factor)))


@dataclass(frozen=True)
class AtomState:
    """Two-level amplitudes on |g> and |e>"""

    c_g: complex
    c_e: complex

    def __post_init__(self) -> None:
        try:
            validate_probability_amplitudes(self.c_g, self.c_e, NUMERIC_POLICY.atom_norm_tol)
        except ValueError as e:
            raise StateError(str(e), operation="AtomState")

    @classmethod
    def ground(cls) -> "AtomState":
        return cls(1.0, 0.0)

    @classmethod
    def excited(cls) -> "AtomState":
        return cls(0.0, 1.0)

    @classmethod
    def equator(cls, phase: float = 0.0) -> "AtomState":
        """(|g> + e^{i phase}|e>)/sqrt(2)"""
        return cls(1 / math.sqrt(2), cmath.exp(1j * phase) / math.sqrt(2))

    @property
    def rho_ee(self) -> float:
        return abs(self.c_e) ** 2

    @property
    def rho_gg(self) -> float:
        return abs(self.c_g) ** 2

    @property
    def rho_eg(self) -> complex:
        """<e|rho|g>"""
        return complex(self.c_e * self.c_g.conjugate())

    def density_matrix(self) -> np.ndarray:
        """2x2 matrix in (|e>, |g>) order"""
        ket = np.array([self.c_e, self.c_g], dtype=np.complex128)
        return np.outer(ket, ket.conj())


@dataclass(frozen=True)
class PauliOps:
    """Single-atom operators in (|e>, |g>) order"""

    sigma_x: Operator
    sigma_y: Operator
    sigma_z: Operator
    sigma_plus: Operator
    sigma_minus: Operator


@dataclass(frozen=True)
class SpinOps:
    """Collective spin operators on the j = N/2 manifold"""

    j_x: Operator
    j_y: Operator
    j_z: Operator
    j_plus: Operator
    j_minus: Operator

    @property
    def dim(self) -> int:
        return self.j_z.dim


# =============================================================================
# Bosonic mode
# =============================================================================


def annihilation(cutoff: FockCutoff) -> Operator:
    """a with entry (n-1, n) = sqrt(n)"""
    offdiag = np.sqrt(np.arange(1, cutoff.d, dtype=np.float64))
    return Operator(np.diagflat(offdiag, 1))


def creation(cutoff: FockCutoff) -> Operator:
    """a†"""
    return annihilation(cutoff).dag()


def number_operator(cutoff: FockCutoff) -> Operator:
    """a†a = diag(0, 1, ..., d-1)"""
    return Operator(np.diag(np.arange(cutoff.d, dtype=np.float64)), hermitian=True)


def ladder_power(cutoff: FockCutoff, p: int) -> Operator:
    """a^p"""
    return Operator(np.linalg.matrix_power(annihilation(cutoff).matrix, p))


def quadrature(theta: float, cutoff: FockCutoff) -> Operator:
    """X(theta) = (a e^{-i theta} + a† e^{i theta}) / sqrt(2)"""
    a = annihilation(cutoff).matrix
    x = (a * cmath.exp(-1j * theta) + a.conj().T * cmath.exp(1j * theta)) / math.sqrt(2)
    return Operator(x, hermitian=True)


# =============================================================================
# Spins
# =============================================================================


def pauli_ops() -> PauliOps:
    """Pauli matrices with sigma_z|e> = +|e>"""
    sp = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    sm = sp.T.copy()
    return PauliOps(
        sigma_x=Operator(sp + sm, hermitian=True),
        sigma_y=Operator(-1j * (sp - sm), hermitian=True),
        sigma_z=Operator(np.diag([1.0, -1.0]), hermitian=True),
        sigma_plus=Operator(sp),
        sigma_minus=Operator(sm),
    )


def collective_spin(n_atoms: int) -> SpinOps:
    """Spin-j representation, j = N/2, on the symmetric Dicke manifold"""
    if n_atoms < 1:
        raise ShapeError(f"Atom count must be >= 1, got {n_atoms}", operation="collective_spin")
    j = n_atoms / 2
    m = j - np.arange(n_atoms + 1)
    # raising from index k (m) to index k-1 (m+1)
    raise_elems = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    j_plus = np.diagflat(raise_elems, 1).astype(np.complex128)
    j_minus = j_plus.conj().T
    return SpinOps(
        j_x=Operator((j_plus + j_minus) / 2, hermitian=True),
        j_y=Operator((j_plus - j_minus) / 2j, hermitian=True),
        j_z=Operator(np.diag(m), hermitian=True),
        j_plus=Operator(j_plus),
        j_minus=Operator(j_minus),
    )


# =============================================================================
# Composite embedding
# =============================================================================


def embed_field(op: Operator, atom_dim: int) -> Operator:
    """op ⊗ I_atom"""
    return compose(op, identity(atom_dim))


def embed_atom(op: Operator, cutoff: FockCutoff) -> Operator:
    """I_field ⊗ op"""
    return compose(identity(cutoff.d), op)


def product_state(field_ket: Ket, atom_ket: Ket) -> Ket:
    """|field> ⊗ |atom>"""
    return compose_kets(field_ket, atom_ket)


# =============================================================================
# States
# =============================================================================


def fock_state(n: int, cutoff: FockCutoff) -> Ket:
    """Number state |n>"""
    if not 0 <= n < cutoff.d:
        raise ShapeError(
            f"Number state |{n}> lies outside cutoff {cutoff.d}", operation="fock_state"
        )
    return Ket.basis(cutoff.d, n)


def coherent_truncation_deficit(alpha: complex, cutoff: FockCutoff) -> float:
    """Poisson weight 1 - sum_{n<d} |c_n|^2 lost to the cutoff"""
    mean = abs(alpha) ** 2
    if mean == 0.0:
        return 0.0
    return float(scipy.special.gammainc(cutoff.d, mean))


def coherent_state(alpha: complex, cutoff: FockCutoff) -> Ket:
    """|alpha> with c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), renormalized after truncation

    Raises:
        TruncationError: If the lost Poisson weight exceeds 1e-4
    """
    alpha = complex(alpha)
    mean = abs(alpha) ** 2
    if mean > cutoff.d / 3:
        _log.warning(f"|alpha|^2 = {mean:.4g} exceeds cutoff/3 = {cutoff.d / 3:.4g}")
    deficit = coherent_truncation_deficit(alpha, cutoff)
    if deficit > NUMERIC_POLICY.coherent_error_deficit:
        raise TruncationError(
            f"Coherent state alpha={alpha} loses {deficit:.3e} of its weight at cutoff {cutoff.d}",
            operation="coherent_state",
            deficit=deficit,
            cutoff=cutoff.d,
        )
    if deficit > NUMERIC_POLICY.coherent_warn_deficit:
        _log.warning(
            f"Coherent state alpha={alpha} renormalized after losing {deficit:.3e} at cutoff {cutoff.d}"
        )
    if mean == 0.0:
        return fock_state(0, cutoff)
    n = np.arange(cutoff.d, dtype=np.float64)
    log_mag = -mean / 2 + n * math.log(abs(alpha)) - 0.5 * scipy.special.gammaln(n + 1)
    amplitudes = np.exp(log_mag) * np.exp(1j * cmath.phase(alpha) * n)
    return Ket.normalized(amplitudes)


def atom_ket(state: AtomState) -> Ket:
    """c_e|e> + c_g|g> in (|e>, |g>) order"""
    amplitudes = np.zeros(2, dtype=np.complex128)
    amplitudes[EXCITED] = state.c_e
    amplitudes[GROUND] = state.c_g
    return Ket(amplitudes)


def dicke_lowest(n_atoms: int) -> Ket:
    """|N/2, -N/2>, all atoms in the ground state"""
    if n_atoms < 1:
        raise ShapeError(f"Atom count must be >= 1, got {n_atoms}", operation="dicke_lowest")
    return Ket.basis(n_atoms + 1, n_atoms)


def dicke_highest(n_atoms: int) -> Ket:
    """|N/2, +N/2>, all atoms excited"""
    if n_atoms < 1:
        raise ShapeError(f"Atom count must be >= 1, got {n_atoms}", operation="dicke_highest")
    return Ket.basis(n_atoms + 1, 0)


# =============================================================================
# Field moments
# =============================================================================


def correlation_moment(field_ket: Ket, p: int) -> float:
    """<a†^p a^p>"""
    cutoff = FockCutoff(field_ket.dim)
    vec = ladder_power(cutoff, p).apply(field_ket)
    return float(np.vdot(vec, vec).real)


def antinormal_moment(field_ket: Ket, p: int) -> float:
    """<a^p a†^p>; loses accuracy for states touching the cutoff"""
    cutoff = FockCutoff(field_ket.dim)
    vec = ladder_power(cutoff, p).dag().apply(field_ket)
    return float(np.vdot(vec, vec).real)


def quadrature_moment(field_ket: Ket, p: int) -> float:
    """<(a†^p + a^p)^2>; loses accuracy for states touching the cutoff"""
    cutoff = FockCutoff(field_ket.dim)
    ap = ladder_power(cutoff, p)
    vec = (ap + ap.dag()).apply(field_ket)
    return float(np.vdot(vec, vec).real)
