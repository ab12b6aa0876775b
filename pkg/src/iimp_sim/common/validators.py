"""
Common Validators for IIMP Sim

Shared validation functions used by the kernel and by the pydantic models.
"""

import math
from typing import Any


def validate_finite(v: float, name: str = "value") -> float:
    """
    Validate that a real parameter is finite.

    Args:
        v: Value to validate
        name: Field name for the error message

    Returns:
        The validated value

    Raises:
        ValueError: If the value is NaN or infinite
    """
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite, got {v}")
    return v


def pydantic_finite_field_validator(cls: Any, v: float) -> float:
    """
    Pydantic-compatible field validator for finite real parameters.

    Usage:
        class MyModel(BaseModel):
            g: float

            validate_finite = field_validator("g")(pydantic_finite_field_validator)

    Raises:
        ValueError: If the value is NaN or infinite
    """
    return validate_finite(v)


def validate_probability_amplitudes(c_g: complex, c_e: complex, tol: float) -> None:
    """
    Validate that two amplitudes form a normalized two-level state.

    Raises:
        ValueError: If |c_g|² + |c_e|² deviates from 1 by more than tol
    """
    norm = abs(c_g) ** 2 + abs(c_e) ** 2
    if abs(norm - 1.0) > tol:
        raise ValueError(
            f"Atomic amplitudes are not normalized: |c_g|^2 + |c_e|^2 = {norm:.15g}"
        )
