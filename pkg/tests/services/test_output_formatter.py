"""Tests for the Report Writer"""

import json
import math

import numpy as np
import pandas as pd
import pytest

from iimp_sim.common.enums import QfiMethod
from iimp_sim.config.runtime_config import RuntimeConfig
from iimp_sim.services.iimp import RatioCurve
from iimp_sim.services.output_formatter import FormattedResult, LimitEntry, ReportWriter
from iimp_sim.services.qfi import QfiResult


@pytest.fixture
def writer(output_env):
    """ReportWriter rooted at a temporary output directory"""
    return ReportWriter(RuntimeConfig())


@pytest.fixture
def curve():
    """Three-point curve without fidelity"""
    return RatioCurve(
        times=np.array([0.0, 20.0, 40.0]),
        delta_target=np.array([0.0, 2e-3, 8e-3]),
        delta_reference=np.array([0.0, 1e-3, 4e-3]),
        ratio=np.array([np.nan, 2.0, 2.0]),
        scaled_ratio=np.array([np.nan, 6.0, 6.0]),
        fidelity=np.full(3, np.nan),
    )


class TestFormattedResult:
    """Tests for FormattedResult dataclass"""

    def test_defaults(self):
        """Test FormattedResult with default values"""
        result = FormattedResult(content="test output")
        assert result.content == "test output"
        assert result.format_type == "text"


class TestLimitEntry:
    """Tests for LimitEntry"""

    def test_abs_diff(self):
        """Test the serialized entry includes |extrapolated - exact|"""
        entry = LimitEntry("jc_fock6", 2.0000001, 2.0, 1e-8)
        data = entry.to_dict()
        assert data["abs_diff"] == pytest.approx(1e-7)
        assert data["label"] == "jc_fock6"


class TestOutputDirectory:
    """Tests for resolve_output_dir"""

    def test_default_under_output_root(self, writer, output_env):
        """Test the default directory lives below IIMP_OUTPUT_DIR"""
        directory = writer.resolve_output_dir(None, "ratio-curves")
        assert directory == output_env / "ratio-curves"
        assert directory.is_dir()

    def test_explicit(self, writer, tmp_path):
        """Test --out wins over the default"""
        directory = writer.resolve_output_dir(tmp_path / "custom", "qfi")
        assert directory == tmp_path / "custom"
        assert directory.is_dir()


class TestCurves:
    """Tests for curves.csv"""

    def test_frame_drops_undefined_columns(self, writer, curve):
        """Test an all-NaN fidelity column is dropped and times are rescaled"""
        frame = writer.curves_frame(curve, time_unit=0.05)
        assert list(frame.columns) == ["t", "delta_target", "delta_reference", "ratio", "scaled_ratio"]
        assert frame["t"].tolist() == pytest.approx([0.0, 1.0, 2.0])

    def test_write_curves(self, writer, curve, tmp_path):
        """Test the header and full-precision float format"""
        path = writer.write_curves(curve, tmp_path / "jc")
        lines = path.read_text().splitlines()
        assert lines[0] == "t,delta_target,delta_reference,ratio,scaled_ratio"
        assert lines[1] == "0,0,0,,"
        assert lines[2] == "20,0.002,0.001,2,6"

    def test_deterministic(self, writer, curve, tmp_path):
        """Test identical curves produce byte-identical files"""
        first = writer.write_curves(curve, tmp_path / "a").read_bytes()
        second = writer.write_curves(curve, tmp_path / "b").read_bytes()
        assert first == second

    def test_round_trip_precision(self, writer, tmp_path):
        """Test values survive the CSV to the last bit"""
        value = 1 / 3
        frame = pd.DataFrame({"t": [value]})
        path = writer.write_frame(frame, tmp_path / "x.csv")
        assert pd.read_csv(path)["t"].iloc[0] == value


class TestJson:
    """Tests for the JSON reports"""

    def test_nan_becomes_null(self, writer, tmp_path):
        """Test non-finite floats are written as null with sorted keys"""
        path = writer.write_json({"b": math.nan, "a": np.float64(1.5), "c": [math.inf]}, tmp_path / "r.json")
        text = path.read_text()
        assert json.loads(text) == {"a": 1.5, "b": None, "c": [None]}
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")

    def test_limits(self, writer, tmp_path):
        """Test limits.json lists every entry"""
        path = writer.write_limits([LimitEntry("a", 2.0, 2.0, 0.0)], tmp_path)
        assert json.loads(path.read_text())["limits"][0]["abs_diff"] == 0.0

    def test_density_matrix(self, writer, tmp_path):
        """Test entries are split into re and im in (|e>, |g>) order"""
        rho = np.array([[0.64, 0.4 + 0.2j], [0.4 - 0.2j, 0.36]])
        data = json.loads(writer.write_density_matrix(rho, tmp_path).read_text())
        assert data["basis"] == ["e", "g"]
        assert data["rho"][0][1] == {"re": 0.4, "im": 0.2}
        assert data["trace"] == pytest.approx(1.0)


class TestQfiCurve:
    """Tests for qfi.csv"""

    def test_frame(self, writer):
        """Test the ratio and onset columns are NaN at t = 0"""
        target = [QfiResult("g", t, f, QfiMethod.FINITE_DIFFERENCE) for t, f in ((0.0, 0.0), (2.0, 96.0))]
        reference = [QfiResult("g", t, f, QfiMethod.FINITE_DIFFERENCE) for t, f in ((0.0, 0.0), (2.0, 48.0))]
        frame = writer.qfi_frame(target, reference, time_unit=0.5)
        assert list(frame.columns) == ["t", "F_target", "F_reference", "qfi_ratio", "F_target_over_t2"]
        assert math.isnan(frame["qfi_ratio"].iloc[0])
        assert frame["qfi_ratio"].iloc[1] == 2.0
        assert frame["F_target_over_t2"].iloc[1] == 24.0
        assert frame["t"].iloc[1] == 1.0

    def test_write(self, writer, tmp_path):
        """Test qfi.csv is written"""
        results = [QfiResult("g", 1.0, 4.0, QfiMethod.FINITE_DIFFERENCE)]
        path = writer.write_qfi_curve(results, results, tmp_path)
        assert path.name == "qfi.csv"
        assert path.read_text().splitlines()[1] == "1,4,4,1,4"


class TestMessages:
    """Tests for console messages"""

    def test_error(self, writer):
        """Test error formatting with context"""
        result = writer.format_error_result("bad config", "jc_fock_vs_coherent.json")
        assert result.content == "[ERROR] bad config\n\nContext: jc_fock_vs_coherent.json"

    def test_error_without_context(self, writer):
        """Test error formatting without context"""
        assert writer.format_error_result("bad").content == "[ERROR] bad"

    def test_summary(self, writer):
        """Test the summary is JSON with NaN mapped to null"""
        result = writer.format_summary({"ratio": math.nan, "order_n": 2})
        assert result.format_type == "json"
        assert json.loads(result.content) == {"order_n": 2, "ratio": None}
