"""
Bootstrap Module for IIMP Sim

Composition Root: This module is responsible for initializing all application layers
and wiring dependencies together. It's the only module that should import from all
layers (Config, Kernel, Services, Presentation).
"""

import logging

from iimp_sim.config.runtime_config import get_runtime_config
from iimp_sim.presentation.service_container import ServiceContainer
from iimp_sim.services.output_formatter import ReportWriter

_log = logging.getLogger(__name__)

# Global application context
_app_context: ServiceContainer | None = None


def initialize() -> ServiceContainer:
    """
    Initialize all application layers and wire dependencies.

    Returns:
        ServiceContainer with all initialized services and configuration

    Raises:
        ConfigError: If an environment variable is malformed
    """
    global _app_context
    if _app_context is not None:
        return _app_context

    # Layer 1: Config (fails fast on malformed environment variables)
    config = get_runtime_config()
    _log.debug(f"Configuration loaded: {config!r}")

    # Layer 3: Services
    report_writer = ReportWriter(config)

    _app_context = ServiceContainer(config=config, report_writer=report_writer)
    return _app_context


def get_container() -> ServiceContainer:
    """
    Get the global service container.

    Raises:
        RuntimeError: If called before initialize()
    """
    if _app_context is None:
        raise RuntimeError("Application not initialized. Call bootstrap.initialize() first.")
    return _app_context


def reset() -> None:
    """Drop the global container (tests and repeated CLI invocations)"""
    global _app_context
    _app_context = None
