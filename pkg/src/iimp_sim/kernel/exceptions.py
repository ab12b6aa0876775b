"""
Domain-specific exceptions for the dense linear-algebra kernel.

Provides custom exceptions that can be caught and handled appropriately
by upper layers while providing context about the failing operation.
"""


class KernelError(Exception):
    """Base class for kernel failures"""

    def __init__(self, message: str, operation: str | None = None):
        self.operation = operation
        super().__init__(message)


class ShapeError(KernelError):
    """Raised when operand dimensions do not match or a matrix is not square"""

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        shapes: tuple[tuple[int, ...], ...] | None = None,
    ):
        self.shapes = shapes
        super().__init__(message, operation)


class SizingError(KernelError):
    """Raised when a composite dimension exceeds the configured maximum"""

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        dim: int | None = None,
        max_dim: int | None = None,
    ):
        self.dim = dim
        self.max_dim = max_dim
        super().__init__(message, operation)


class NumericalError(KernelError):
    """Raised when an eigendecomposition fails or loses accuracy"""

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        condition: dict[str, float] | None = None,
    ):
        self.condition = condition or {}
        super().__init__(message, operation)


class StateError(KernelError):
    """Raised when a state or operator violates its construction invariant"""

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        violation: float | None = None,
    ):
        self.violation = violation
        super().__init__(message, operation)


class TruncationError(KernelError):
    """Raised when a coherent state loses too much weight to the Fock cutoff"""

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        deficit: float | None = None,
        cutoff: int | None = None,
    ):
        self.deficit = deficit
        self.cutoff = cutoff
        super().__init__(message, operation)
