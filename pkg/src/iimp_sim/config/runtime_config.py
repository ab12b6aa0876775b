"""
Runtime Configuration Management for IIMP Sim

Process-wide settings read from environment variables (a ``.env`` file is
loaded by the entry point before this module is used).

Configuration Pattern:
    RuntimeConfig uses a fail-fast initialization pattern: any malformed
    variable raises ConfigError during __init__() naming the offending key.
    Missing variables fall back to the defaults in config/constants.py.
"""

import logging
import os
from dataclasses import dataclass

from iimp_sim.config.constants import (
    DEFAULT_LOG_LEVEL,
    DEFAULT_MAX_DIM,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SEED,
)
from iimp_sim.config.exceptions import ConfigError

_VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class KernelLimits:
    """Sizing limits for the dense kernel"""

    max_dim: int = DEFAULT_MAX_DIM


class RuntimeConfig:
    """Main runtime configuration class"""

    def __init__(self) -> None:
        """Initialize configuration from environment variables"""
        self.limits = KernelLimits(max_dim=self._read_int("IIMP_MAX_DIM", DEFAULT_MAX_DIM))
        self.output_dir: str = os.getenv("IIMP_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)
        self.seed: int = self._read_int("IIMP_DEFAULT_SEED", DEFAULT_SEED, minimum=0)

        level = os.getenv("IIMP_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()
        if level not in _VALID_LOG_LEVELS:
            raise ConfigError(
                f"Unknown log level: {level}. Use one of {', '.join(_VALID_LOG_LEVELS)}",
                config_key="IIMP_LOG_LEVEL",
                reason="invalid",
            )
        self.log_level: str = level

    @staticmethod
    def _read_int(key: str, default: int, minimum: int = 1) -> int:
        """Read an integer environment variable, failing fast on bad values"""
        raw = os.getenv(key)
        if raw is None:
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(
                f"{key} must be an integer, got {raw!r}",
                config_key=key,
                reason="invalid",
            )
        if value < minimum:
            raise ConfigError(
                f"{key} must be >= {minimum}, got {value}",
                config_key=key,
                reason="invalid",
            )
        return value

    @property
    def log_level_value(self) -> int:
        """Numeric logging level"""
        return int(getattr(logging, self.log_level))

    def __repr__(self) -> str:
        """String representation for debugging"""
        return (
            f"RuntimeConfig(max_dim={self.limits.max_dim}, "
            f"output_dir={self.output_dir!r}, log_level={self.log_level})"
        )


_runtime_config: RuntimeConfig | None = None


def get_runtime_config() -> RuntimeConfig:
    """Return the process-wide runtime configuration, loading it on first use"""
    global _runtime_config
    if _runtime_config is None:
        _runtime_config = RuntimeConfig()
    return _runtime_config


def reset_runtime_config() -> None:
    """Forget the cached configuration so the next access re-reads the environment"""
    global _runtime_config
    _runtime_config = None
