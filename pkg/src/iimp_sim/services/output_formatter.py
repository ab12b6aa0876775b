"""
Report Writer for IIMP Sim

Handles the on-disk result formats: curves.csv, limits.json, report.json,
density_matrix.json and qfi.csv. Output is deterministic: identical inputs
produce byte-identical files.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from iimp_sim.config.constants import CSV_COLUMNS, CSV_FLOAT_FORMAT
from iimp_sim.config.runtime_config import RuntimeConfig
from iimp_sim.services.iimp import RatioCurve
from iimp_sim.services.qfi import QfiResult

_log = logging.getLogger(__name__)


@dataclass
class FormattedResult:
    """Formatted message with its format type"""

    content: str
    format_type: str = "text"  # "text" for human-readable, "json" for structured data


@dataclass(frozen=True)
class LimitEntry:
    """One row of limits.json"""

    label: str
    extrapolated: float
    exact: float
    error_estimate: float

    @property
    def abs_diff(self) -> float:
        return abs(self.extrapolated - self.exact)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "extrapolated": self.extrapolated,
            "exact": self.exact,
            "abs_diff": self.abs_diff,
            "error_estimate": self.error_estimate,
        }


def _json_safe(value: Any) -> Any:
    """Replace non-finite floats by None and numpy scalars by Python ones"""
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ReportWriter:
    """Writes experiment results below the configured output directory"""

    def __init__(self, config: RuntimeConfig):
        """Initialize writer with configuration"""
        self.config = config

    def resolve_output_dir(self, out: str | Path | None, default_name: str) -> Path:
        """--out if given, else <IIMP_OUTPUT_DIR>/<default_name>; created if missing"""
        directory = Path(out) if out is not None else Path(self.config.output_dir) / default_name
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def curves_frame(self, curve: RatioCurve, time_unit: float = 1.0) -> pd.DataFrame:
        """Curve table with times multiplied by time_unit; all-NaN columns are dropped"""
        frame = pd.DataFrame(
            {
                "t": curve.times * time_unit,
                "delta_target": curve.delta_target,
                "delta_reference": curve.delta_reference,
                "ratio": curve.ratio,
                "scaled_ratio": curve.scaled_ratio,
                "fidelity": curve.fidelity,
            },
            columns=list(CSV_COLUMNS),
        )
        undefined = [c for c in CSV_COLUMNS if c != "t" and frame[c].isna().all()]
        return frame.drop(columns=undefined)

    def write_frame(self, frame: pd.DataFrame, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, float_format=CSV_FLOAT_FORMAT, index=False, lineterminator="\n")
        _log.debug(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_curves(self, curve: RatioCurve, directory: Path, time_unit: float = 1.0) -> Path:
        return self.write_frame(self.curves_frame(curve, time_unit), directory / "curves.csv")

    def write_json(self, payload: Any, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(_json_safe(payload), indent=2, sort_keys=True, allow_nan=False)
        path.write_text(text + "\n", encoding="utf-8")
        _log.debug(f"Wrote {path}")
        return path

    def write_limits(self, entries: list[LimitEntry], directory: Path) -> Path:
        return self.write_json({"limits": [e.to_dict() for e in entries]}, directory / "limits.json")

    def write_report(self, payload: dict[str, Any], directory: Path) -> Path:
        return self.write_json(payload, directory / "report.json")

    def write_density_matrix(self, matrix: NDArray[np.complex128], directory: Path) -> Path:
        """Entries as {"re", "im"} in (|e>, |g>) order"""
        rows = [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in matrix]
        return self.write_json(
            {"basis": ["e", "g"], "rho": rows, "trace": float(np.trace(matrix).real)},
            directory / "density_matrix.json",
        )

    def qfi_frame(
        self,
        target: list[QfiResult],
        reference: list[QfiResult],
        time_unit: float = 1.0,
    ) -> pd.DataFrame:
        """Columns t, F_target, F_reference, qfi_ratio, F_target_over_t2 (ratios NaN at t = 0)"""
        times = np.array([r.t for r in target], dtype=np.float64)
        f_target = np.array([r.F for r in target], dtype=np.float64)
        f_reference = np.array([r.F for r in reference], dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(f_reference != 0.0, f_target / f_reference, np.nan)
            onset = np.where(times > 0, f_target / times**2, np.nan)
        return pd.DataFrame(
            {
                "t": times * time_unit,
                "F_target": f_target,
                "F_reference": f_reference,
                "qfi_ratio": ratio,
                "F_target_over_t2": onset,
            }
        )

    def write_qfi_curve(
        self,
        target: list[QfiResult],
        reference: list[QfiResult],
        directory: Path,
        time_unit: float = 1.0,
    ) -> Path:
        frame = self.qfi_frame(target, reference, time_unit)
        return self.write_frame(frame, directory / "qfi.csv")

    def format_error_result(self, error_message: str, context: str = "") -> FormattedResult:
        """Format error message with optional context"""
        content = f"[ERROR] {error_message}"
        if context:
            content += f"\n\nContext: {context}"
        return FormattedResult(content=content, format_type="text")

    def format_summary(self, payload: dict[str, Any]) -> FormattedResult:
        """JSON summary for stdout"""
        return FormattedResult(
            content=json.dumps(_json_safe(payload), indent=2, sort_keys=True),
            format_type="json",
        )
