"""
Exceptions for Configuration Layer

Raised while reading IIMP_* environment variables or an experiment
config file, before any simulation starts.
"""

from pathlib import Path


class ConfigError(Exception):
    """
    Fatal configuration problem; the run cannot start.

    Examples:
        - Non-integer or non-positive IIMP_MAX_DIM
        - Unknown IIMP_LOG_LEVEL
        - Experiment config that is unreadable or names another command
    """

    def __init__(
        self,
        message: str,
        config_key: str | None = None,
        reason: str | None = None,
        path: Path | None = None,
    ):
        """
        Args:
            message: Error description
            config_key: Offending key, e.g. "IIMP_MAX_DIM" or "experiment"
            reason: "missing", "invalid" or "not_found"
            path: Experiment config file, when one is involved
        """
        self.config_key = config_key
        self.reason = reason
        self.path = path
        super().__init__(message)
