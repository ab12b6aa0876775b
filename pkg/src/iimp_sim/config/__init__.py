"""
Configuration layer for IIMP Sim

Provides runtime settings read from the environment and the shared defaults.
"""

from iimp_sim.config.exceptions import ConfigError
from iimp_sim.config.runtime_config import (
    KernelLimits,
    RuntimeConfig,
    get_runtime_config,
    reset_runtime_config,
)

__all__ = [
    "ConfigError",
    "KernelLimits",
    "RuntimeConfig",
    "get_runtime_config",
    "reset_runtime_config",
]
