"""Tests for Service Container"""

import dataclasses

from iimp_sim.config.runtime_config import RuntimeConfig
from iimp_sim.presentation.service_container import ServiceContainer
from iimp_sim.services.output_formatter import ReportWriter


class TestServiceContainer:
    """Tests for ServiceContainer dataclass"""

    def test_service_container_creation(self, mocker):
        """Test creating ServiceContainer with mocked services"""
        config = mocker.MagicMock(spec=RuntimeConfig)
        writer = mocker.MagicMock(spec=ReportWriter)

        container = ServiceContainer(config=config, report_writer=writer)

        assert container.config is config
        assert container.report_writer is writer

    def test_service_container_fields(self):
        """Test the container exposes exactly the wired services"""
        names = [f.name for f in dataclasses.fields(ServiceContainer)]
        assert names == ["config", "report_writer"]

    def test_service_container_with_real_services(self):
        """Test wiring real services"""
        config = RuntimeConfig()
        container = ServiceContainer(config=config, report_writer=ReportWriter(config))

        assert container.report_writer.config is config
