"""
Service Container for IIMP Sim

Provides type-safe service dependency management.
"""

from dataclasses import dataclass

from iimp_sim.config.runtime_config import RuntimeConfig
from iimp_sim.services.output_formatter import ReportWriter


@dataclass
class ServiceContainer:
    """Container for all application services with proper typing

    Attributes:
        config: Runtime configuration read from the environment
        report_writer: CSV/JSON report writer
    """

    config: RuntimeConfig
    report_writer: ReportWriter
