"""
Dense Hilbert-Space Kernel for IIMP Sim

Immutable operator and state containers plus the pure linear-algebra
operations everything else is built from: tensor products, commutators,
Hermitian matrix exponentials, expectations, reduced states and fidelities.

All frequencies are in units of omega_a and all times in units of 1/omega_a
(hbar = 1). Complex comparisons use the max-abs entrywise norm.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from iimp_sim.common.constants import FIELD_FIRST, NUMERIC_POLICY
from iimp_sim.config.runtime_config import get_runtime_config
from iimp_sim.kernel.exceptions import (
    NumericalError,
    ShapeError,
    SizingError,
    StateError,
)

_log = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]


def _frozen(values: ArrayLike) -> ComplexArray:
    """Copy into a read-only complex128 array"""
    arr = np.array(values, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def max_abs(matrix: ArrayLike) -> float:
    """Max-abs entrywise norm"""
    arr = np.asarray(matrix)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def check_dimension(dim: int, operation: str) -> None:
    """Raise SizingError when dim exceeds the configured kernel maximum"""
    max_dim = get_runtime_config().limits.max_dim
    if dim > max_dim:
        raise SizingError(
            f"{operation}: dimension {dim} exceeds the configured maximum {max_dim}",
            operation=operation,
            dim=dim,
            max_dim=max_dim,
        )


# =============================================================================
# Containers
# =============================================================================


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square complex matrix on a finite Hilbert space.

    ``hermitian=True`` tags the operator as Hermitian; the tag is verified on
    construction against ``max|O - O†| <= 1e-12 * max(1, max|O|)``.
    """

    matrix: ComplexArray
    hermitian: bool = False

    def __post_init__(self) -> None:
        arr = _frozen(self.matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeError(
                f"Operator must be a square matrix, got shape {arr.shape}",
                operation="Operator",
                shapes=(arr.shape,),
            )
        if arr.shape[0] < 1:
            raise ShapeError("Operator dimension must be positive", operation="Operator")
        object.__setattr__(self, "matrix", arr)
        if self.hermitian:
            defect = self.hermiticity_defect()
            limit = NUMERIC_POLICY.hermitian_tol * max(1.0, max_abs(arr))
            if defect > limit:
                raise StateError(
                    f"Operator tagged Hermitian has max|O - O†| = {defect:.3e} > {limit:.3e}",
                    operation="Operator",
                    violation=defect,
                )

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def hermiticity_defect(self) -> float:
        """max|O - O†|"""
        return max_abs(self.matrix - self.matrix.conj().T)

    def is_hermitian(self, tol: float | None = None) -> bool:
        """Check Hermiticity relative to max(1, max|O|)"""
        tol = NUMERIC_POLICY.hermitian_tol if tol is None else tol
        return self.hermiticity_defect() <= tol * max(1.0, max_abs(self.matrix))

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, hermitian=self.hermitian)

    def scaled(self, factor: complex) -> "Operator":
        keep = self.hermitian and complex(factor).imag == 0.0
        return Operator(self.matrix * factor, hermitian=keep)

    def __add__(self, other: "Operator") -> "Operator":
        _require_same_dim(self.dim, other.dim, "add")
        return Operator(self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _require_same_dim(self.dim, other.dim, "sub")
        return Operator(self.matrix - other.matrix)

    def __neg__(self) -> "Operator":
        return Operator(-self.matrix, hermitian=self.hermitian)

    def __mul__(self, factor: complex) -> "Operator":
        return Operator(self.matrix * factor)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        _require_same_dim(self.dim, other.dim, "matmul")
        return Operator(self.matrix @ other.matrix)

    def apply(self, state: "Ket") -> ComplexArray:
        """Unnormalized vector O|psi>"""
        _require_same_dim(self.dim, state.dim, "apply")
        result: ComplexArray = self.matrix @ state.amplitudes
        return result


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized pure state; | ||amplitudes||_2 - 1 | <= 1e-10"""

    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        arr = _frozen(self.amplitudes)
        if arr.ndim != 1 or arr.size < 1:
            raise ShapeError(
                f"Ket amplitudes must be a non-empty vector, got shape {arr.shape}",
                operation="Ket",
                shapes=(arr.shape,),
            )
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NUMERIC_POLICY.ket_norm_tol:
            raise StateError(
                f"Ket is not normalized: ||psi|| = {norm:.15g}",
                operation="Ket",
                violation=abs(norm - 1.0),
            )
        object.__setattr__(self, "amplitudes", arr)

    @classmethod
    def normalized(cls, amplitudes: ArrayLike) -> "Ket":
        """Build a ket after dividing by the 2-norm"""
        arr = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise StateError("Cannot normalize the zero vector", operation="Ket")
        return cls(arr / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "Ket":
        """Computational basis vector |index>"""
        if not 0 <= index < dim:
            raise ShapeError(
                f"Basis index {index} outside dimension {dim}", operation="Ket.basis"
            )
        arr = np.zeros(dim, dtype=np.complex128)
        arr[index] = 1.0
        return cls(arr)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def projector(self) -> "DensityMatrix":
        return density_from_ket(self)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive unit-trace Hermitian matrix"""

    matrix: ComplexArray

    def __post_init__(self) -> None:
        arr = _frozen(self.matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ShapeError(
                f"DensityMatrix must be square, got shape {arr.shape}",
                operation="DensityMatrix",
                shapes=(arr.shape,),
            )
        defect = max_abs(arr - arr.conj().T)
        if defect > NUMERIC_POLICY.hermitian_tol:
            raise StateError(
                f"DensityMatrix is not Hermitian: max|rho - rho†| = {defect:.3e}",
                operation="DensityMatrix",
                violation=defect,
            )
        trace = complex(np.trace(arr))
        if abs(trace - 1.0) > NUMERIC_POLICY.trace_tol:
            raise StateError(
                f"DensityMatrix trace is {trace:.15g}, expected 1",
                operation="DensityMatrix",
                violation=abs(trace - 1.0),
            )
        smallest = float(np.min(scipy.linalg.eigvalsh(arr)))
        if smallest < -NUMERIC_POLICY.positivity_tol:
            raise StateError(
                f"DensityMatrix has negative eigenvalue {smallest:.3e}",
                operation="DensityMatrix",
                violation=-smallest,
            )
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def _require_same_dim(a: int, b: int, operation: str) -> None:
    if a != b:
        raise ShapeError(
            f"{operation}: dimension mismatch {a} vs {b}",
            operation=operation,
            shapes=((a,), (b,)),
        )


# =============================================================================
# Algebra
# =============================================================================


def identity(dim: int) -> Operator:
    """Identity operator"""
    return Operator(np.eye(dim, dtype=np.complex128), hermitian=True)


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; entry (i*b.dim + k, j*b.dim + l) = A(i, j) * B(k, l)"""
    check_dimension(a.dim * b.dim, "kron")
    return Operator(np.kron(a.matrix, b.matrix), hermitian=a.hermitian and b.hermitian)


def compose(field_op: Operator, atom_op: Operator) -> Operator:
    """Lift a field operator and an atom operator onto the composite space"""
    if FIELD_FIRST:
        return kron(field_op, atom_op)
    return kron(atom_op, field_op)


def compose_kets(field_ket: Ket, atom_ket: Ket) -> Ket:
    """Product state in the composite ordering"""
    check_dimension(field_ket.dim * atom_ket.dim, "compose_kets")
    if FIELD_FIRST:
        return Ket(np.kron(field_ket.amplitudes, atom_ket.amplitudes))
    return Ket(np.kron(atom_ket.amplitudes, field_ket.amplitudes))


def commutator(a: Operator, b: Operator) -> Operator:
    """[A, B] = AB - BA"""
    _require_same_dim(a.dim, b.dim, "commutator")
    return Operator(a.matrix @ b.matrix - b.matrix @ a.matrix)


def nested_commutator(h: Operator, a: Operator, n: int) -> Operator:
    """(iH)^{xn}(A) = [iH, (iH)^{x(n-1)}(A)], with (iH)^{x0}(A) = A"""
    _require_same_dim(h.dim, a.dim, "nested_commutator")
    if n < 0:
        raise ValueError(f"Commutator order must be >= 0, got {n}")
    ih = 1j * h.matrix
    current = np.array(a.matrix)
    for _ in range(n):
        current = ih @ current - current @ ih
    return Operator(current)


def nested_commutators(h: Operator, a: Operator, max_n: int) -> list[Operator]:
    """[(iH)^{x1}(A), ..., (iH)^{x max_n}(A)] sharing intermediate products"""
    _require_same_dim(h.dim, a.dim, "nested_commutators")
    ih = 1j * h.matrix
    current = np.array(a.matrix)
    result: list[Operator] = []
    for _ in range(max_n):
        current = ih @ current - current @ ih
        result.append(Operator(current))
    return result


# =============================================================================
# Exponentials
# =============================================================================


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Hermitian eigendecomposition H = V diag(E) V†, shared by every time point"""

    energies: RealArray
    vectors: ComplexArray
    _vectors_dag: ComplexArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        energies = np.array(self.energies, dtype=np.float64, copy=True)
        energies.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "vectors", _frozen(self.vectors))
        object.__setattr__(self, "_vectors_dag", _frozen(self.vectors.conj().T))

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    def phases(self, t: float) -> ComplexArray:
        """exp(-i E t)"""
        result: ComplexArray = np.exp(-1j * self.energies * t)
        return result

    def propagator(self, t: float) -> Operator:
        """U(t) = V exp(-i Lambda t) V†; exactly the identity at t = 0"""
        if t == 0.0:
            return identity(self.dim)
        return Operator((self.vectors * self.phases(t)) @ self._vectors_dag)

    def evolve_vector(self, vector: ComplexArray, t: float) -> ComplexArray:
        """U(t) applied to a raw vector"""
        if t == 0.0:
            return np.array(vector, dtype=np.complex128)
        result: ComplexArray = self.vectors @ (self.phases(t) * (self._vectors_dag @ vector))
        return result

    def to_eigenbasis(self, matrix: ComplexArray) -> ComplexArray:
        """V† M V"""
        result: ComplexArray = self._vectors_dag @ matrix @ self.vectors
        return result

    def vector_to_eigenbasis(self, vector: ComplexArray) -> ComplexArray:
        """V† v"""
        result: ComplexArray = self._vectors_dag @ vector
        return result


def eigensystem(h: Operator) -> EigenSystem:
    """Diagonalize a Hermitian operator.

    Raises:
        StateError: If H is not Hermitian within tolerance
        NumericalError: If the eigensolver fails
    """
    if not h.is_hermitian():
        raise StateError(
            f"expm_unitary requires a Hermitian operator; max|H - H†| = {h.hermiticity_defect():.3e}",
            operation="eigensystem",
            violation=h.hermiticity_defect(),
        )
    try:
        energies, vectors = scipy.linalg.eigh(h.matrix, check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        condition = {
            "dim": float(h.dim),
            "max_abs": max_abs(h.matrix),
            "hermiticity_defect": h.hermiticity_defect(),
            "finite": float(np.all(np.isfinite(h.matrix))),
        }
        raise NumericalError(
            f"Hermitian eigendecomposition failed: {e}",
            operation="eigensystem",
            condition=condition,
        )
    _log.debug(f"Diagonalized dim={h.dim}, spectrum [{energies[0]:.6g}, {energies[-1]:.6g}]")
    return EigenSystem(energies=energies, vectors=vectors)


def expm_unitary(h: Operator, t: float) -> Operator:
    """exp(-iHt) via Hermitian eigendecomposition"""
    return eigensystem(h).propagator(t)


def unitarity_defect(u: Operator) -> float:
    """max|U†U - I|"""
    return max_abs(u.matrix.conj().T @ u.matrix - np.eye(u.dim))


# =============================================================================
# Expectations and fidelities
# =============================================================================


def expectation(state: Ket, a: Operator) -> complex:
    """<psi|A|psi>"""
    _require_same_dim(state.dim, a.dim, "expectation")
    return complex(np.vdot(state.amplitudes, a.matrix @ state.amplitudes))


def expectation_mixed(rho: DensityMatrix, a: Operator) -> complex:
    """Tr[rho A]"""
    _require_same_dim(rho.dim, a.dim, "expectation_mixed")
    return complex(np.einsum("ij,ji->", rho.matrix, a.matrix))


def fidelity_pure(psi: Ket, phi: Ket) -> float:
    """|<psi|phi>|^2"""
    _require_same_dim(psi.dim, phi.dim, "fidelity_pure")
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


def fidelity_mixed_pure(rho: DensityMatrix, phi: Ket) -> float:
    """<phi|rho|phi>"""
    _require_same_dim(rho.dim, phi.dim, "fidelity_mixed_pure")
    return float(np.vdot(phi.amplitudes, rho.matrix @ phi.amplitudes).real)


def density_from_ket(psi: Ket) -> DensityMatrix:
    """|psi><psi|"""
    return DensityMatrix(np.outer(psi.amplitudes, psi.amplitudes.conj()))


def mixture(weights: Sequence[float], kets: Sequence[Ket]) -> DensityMatrix:
    """Convex combination sum_k w_k |psi_k><psi_k|"""
    if len(weights) != len(kets) or not kets:
        raise ShapeError("mixture needs one weight per ket", operation="mixture")
    if any(w < 0 for w in weights):
        raise StateError("mixture weights must be non-negative", operation="mixture")
    dim = kets[0].dim
    total = np.zeros((dim, dim), dtype=np.complex128)
    for w, ket in zip(weights, kets):
        _require_same_dim(dim, ket.dim, "mixture")
        total += w * np.outer(ket.amplitudes, ket.amplitudes.conj())
    return DensityMatrix(total)


def evolve_density(eig: EigenSystem, rho: DensityMatrix, t: float) -> DensityMatrix:
    """rho(t) = U rho U†"""
    if t == 0.0:
        return rho
    u = eig.propagator(t).matrix
    evolved = u @ rho.matrix @ u.conj().T
    return DensityMatrix(0.5 * (evolved + evolved.conj().T))


def partial_trace(
    state: Ket | DensityMatrix,
    dims: tuple[int, int],
    keep: Literal["field", "atom"],
) -> DensityMatrix:
    """Reduced state of one subsystem of the composite field ⊗ atom space"""
    d_field, d_atom = dims
    if d_field * d_atom != state.dim:
        raise ShapeError(
            f"partial_trace: {d_field} x {d_atom} does not match dimension {state.dim}",
            operation="partial_trace",
        )
    first, second = (d_field, d_atom) if FIELD_FIRST else (d_atom, d_field)
    keep_first = (keep == "field") == FIELD_FIRST
    if isinstance(state, Ket):
        m = state.amplitudes.reshape(first, second)
        reduced = m @ m.conj().T if keep_first else m.T @ m.conj()
    else:
        t = state.matrix.reshape(first, second, first, second)
        reduced = np.einsum("ikjk->ij", t) if keep_first else np.einsum("kikj->ij", t)
    return DensityMatrix(0.5 * (reduced + reduced.conj().T))


# =============================================================================
# Cancellation-free expectation changes
# =============================================================================


@dataclass(frozen=True, eq=False)
class ChangeEvaluator:
    """Evaluates Delta<A>(t) = Tr[rho U†AU] - Tr[rho A] in the eigenbasis of H.

    With w_jk = E_j - E_k the change is sum_jk M_jk (e^{i w_jk t} - 1), and
    e^{ix} - 1 = 2i sin(x/2) e^{ix/2} keeps full relative precision for
    changes far below the scale of <A>.
    """

    weights: ComplexArray
    gaps: RealArray
    initial_mean: float

    def __call__(self, t: float) -> float:
        if t == 0.0:
            return 0.0
        half = 0.5 * self.gaps * t
        factor = 2j * np.sin(half) * np.exp(1j * half)
        return float(np.sum(self.weights * factor).real)

    def values(self, times: Iterable[float]) -> RealArray:
        return np.array([self(float(t)) for t in times], dtype=np.float64)


def change_evaluator(
    eig: EigenSystem, state: Ket | DensityMatrix, a: Operator
) -> ChangeEvaluator:
    """Precompute the eigenbasis weights of Delta<A>(t) for one initial state"""
    _require_same_dim(eig.dim, a.dim, "change_evaluator")
    _require_same_dim(eig.dim, state.dim, "change_evaluator")
    a_tilde = eig.to_eigenbasis(a.matrix)
    if isinstance(state, Ket):
        psi = eig.vector_to_eigenbasis(state.amplitudes)
        weights = psi.conj()[:, None] * a_tilde * psi[None, :]
        initial = expectation(state, a).real
    else:
        rho_tilde = eig.to_eigenbasis(state.matrix)
        weights = a_tilde * rho_tilde.T
        initial = expectation_mixed(state, a).real
    gaps = eig.energies[:, None] - eig.energies[None, :]
    return ChangeEvaluator(weights=_frozen(weights), gaps=gaps, initial_mean=float(initial))


def delta_expectation(eig: EigenSystem, state: Ket | DensityMatrix, a: Operator, t: float) -> float:
    """Delta<A>(t) at a single time"""
    return change_evaluator(eig, state, a)(t)
