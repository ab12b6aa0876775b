"""
Domain-specific exceptions for the simulation services.

Provides custom exceptions that can be caught and handled appropriately
by the presentation layer while providing context about which state,
stage or block failed.
"""


class SimulationError(Exception):
    """Base class for model, evolution, IIMP and QFI failures"""

    def __init__(self, message: str, stage: str | None = None):
        self.stage = stage
        super().__init__(message)


class ParameterError(SimulationError):
    """Raised when ModelParams violate an invariant of the requested model"""

    def __init__(self, message: str, stage: str | None = None, field: str | None = None):
        self.field = field
        super().__init__(message, stage)


class BlockAbsentError(SimulationError):
    """Raised when a JC block is requested for n < p"""

    def __init__(self, message: str, n: int | None = None, p: int | None = None):
        self.n = n
        self.p = p
        super().__init__(message)


class DegenerateReferenceError(SimulationError):
    """Raised when a calibration denominator vanishes"""

    def __init__(self, message: str, stage: str | None = None, state: str = "reference"):
        self.state = state
        super().__init__(message, stage)


class UndetectableOrderError(SimulationError):
    """Raised when no commutator order up to max_n has a nonzero expectation"""

    def __init__(self, message: str, max_n: int | None = None):
        self.max_n = max_n
        super().__init__(message)


class OrderMismatchError(SimulationError):
    """Raised when target and reference do not share the first nonzero order"""

    def __init__(self, message: str, order: int | None = None, vanished: str | None = None):
        self.order = order
        self.vanished = vanished
        super().__init__(message)


class UnderflowGuardError(SimulationError):
    """Raised when the reference change at the smallest ladder time is unresolvable"""

    def __init__(self, message: str, smallest_change: float | None = None):
        self.smallest_change = smallest_change
        super().__init__(message)


class StepSizeError(SimulationError):
    """Raised when a finite-difference step fails its halving check"""

    def __init__(self, message: str, step: float | None = None, change: float | None = None):
        self.step = step
        self.change = change
        super().__init__(message)


class ConvergenceError(SimulationError):
    """Raised when a result drifts under a cutoff increase"""

    def __init__(self, message: str, stage: str | None = None, drift: float | None = None):
        self.drift = drift
        super().__init__(message, stage)
