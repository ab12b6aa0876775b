#!/usr/bin/env python3
"""
IIMP Sim - Main Entry Point

Runs ratio-curve, tomography and QFI experiments from JSON configs and the
numerical validation suite.

Usage:
    iimp tomography --config configs/tomography.json
    iimp ratio-curves --config configs/jc_fock_vs_coherent.json [--out DIR] [--cutoff-check]
    iimp qfi --config configs/qfi_jc.json
    iimp validate [--seed N] [--transcription as-printed] [--cutoff 20]
"""

import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from iimp_sim import __version__
from iimp_sim.common.enums import ExperimentKind, Transcription
from iimp_sim.config.constants import DEFAULT_COHERENT_CUTOFF
from iimp_sim.config.exceptions import ConfigError
from iimp_sim.config.runtime_config import get_runtime_config
from iimp_sim.kernel.exceptions import KernelError
from iimp_sim.presentation import bootstrap
from iimp_sim.presentation.experiments import run_qfi, run_ratio_curves, run_tomography
from iimp_sim.presentation.models import ExperimentConfig
from iimp_sim.presentation.service_container import ServiceContainer
from iimp_sim.presentation.validation import run_validate
from iimp_sim.services.exceptions import SimulationError

_log = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_VALIDATION_FAILED = 2

Runner = Callable[[ExperimentConfig, ServiceContainer, str | None, bool], dict[str, Any]]


def _fail(message: str, context: str = "") -> None:
    """Print a formatted error to stderr and exit with status 1"""
    try:
        formatted = bootstrap.get_container().report_writer.format_error_result(message, context)
        text = formatted.content
    except RuntimeError:
        text = f"[ERROR] {message}"
    click.echo(text, err=True)
    sys.exit(EXIT_ERROR)


def load_experiment_config(path: Path, expected: ExperimentKind) -> ExperimentConfig:
    """Read and validate an experiment config

    Raises:
        ConfigError: If the file cannot be read or names another experiment
        ValidationError: If the JSON does not match the schema
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}", reason="not_found", path=path)
    config = ExperimentConfig.model_validate_json(text)
    if config.experiment is not expected:
        raise ConfigError(
            f"{path} describes a {config.experiment.value} experiment, not {expected.value}",
            config_key="experiment",
            reason="invalid",
            path=path,
        )
    return config


def _run_experiment(
    kind: ExperimentKind,
    runner: Runner,
    config_path: Path,
    out: str | None,
    cutoff_check: bool,
    seed: int | None,
) -> None:
    try:
        container = bootstrap.initialize()
        config = load_experiment_config(config_path, kind)
        _log.info(f"Running {kind.value} from {config_path}")
        summary = runner(config, container, out, cutoff_check)
        summary["seed"] = container.config.seed if seed is None else seed
        click.echo(container.report_writer.format_summary(summary).content)
    except ValidationError as e:
        _fail(f"Invalid experiment config {config_path}", str(e))
    except ConfigError as e:
        _fail(str(e), f"config key: {e.config_key}" if e.config_key else "")
    except SimulationError as e:
        _fail(f"{type(e).__name__}: {e}", f"stage: {e.stage}" if e.stage else "")
    except KernelError as e:
        _fail(f"{type(e).__name__}: {e}", f"operation: {e.operation}" if e.operation else "")


config_option = click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Experiment config JSON",
)
out_option = click.option("--out", default=None, help="Output directory (default: config or IIMP_OUTPUT_DIR)")
cutoff_check_option = click.option(
    "--cutoff-check",
    is_flag=True,
    help="Re-run the limits at 1.5x the Fock cutoff and fail on drift",
)
seed_option = click.option("--seed", type=int, default=None, help="Seed for randomized instances")


@click.group()
@click.version_option(__version__, prog_name="iimp", message="%(prog)s version %(version)s")
@click.option("--verbose", is_flag=True, help="Log at DEBUG level")
def main(verbose: bool) -> None:
    """Instantaneous indirect measurement simulator."""
    # .env is loaded before the runtime config is first read
    load_dotenv()
    try:
        level = logging.DEBUG if verbose else get_runtime_config().log_level_value
    except ConfigError as e:
        _fail(str(e), f"config key: {e.config_key}")
        return
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@config_option
@out_option
@cutoff_check_option
@seed_option
def tomography(config_path: Path, out: str | None, cutoff_check: bool, seed: int | None) -> None:
    """Reconstruct an atomic state from three indirect photon-number measurements."""
    _run_experiment(ExperimentKind.TOMOGRAPHY, run_tomography, config_path, out, cutoff_check, seed)


@main.command("ratio-curves")
@config_option
@out_option
@cutoff_check_option
@seed_option
def ratio_curves(config_path: Path, out: str | None, cutoff_check: bool, seed: int | None) -> None:
    """Finite-time ratio curves and their t -> 0 limits."""
    _run_experiment(ExperimentKind.RATIO_CURVES, run_ratio_curves, config_path, out, cutoff_check, seed)


@main.command()
@config_option
@out_option
@cutoff_check_option
@seed_option
def qfi(config_path: Path, out: str | None, cutoff_check: bool, seed: int | None) -> None:
    """Quantum Fisher information of the coupling and its indirect estimate."""
    _run_experiment(ExperimentKind.QFI, run_qfi, config_path, out, cutoff_check, seed)


@main.command()
@seed_option
@click.option(
    "--transcription",
    type=click.Choice([t.value for t in Transcription]),
    default=Transcription.AS_DERIVED.value,
    show_default=True,
    help="Form of the JC block diagonal entry checked against the numerics",
)
@click.option(
    "--cutoff",
    type=click.IntRange(min=2),
    default=DEFAULT_COHERENT_CUTOFF,
    show_default=True,
    help="Fock cutoff of the coherent-state convergence check",
)
@out_option
def validate(seed: int | None, transcription: str, cutoff: int, out: str | None) -> None:
    """Run the numerical invariant checks; exits 2 if any fails."""
    try:
        container = bootstrap.initialize()
        report = run_validate(container, seed, Transcription(transcription), cutoff, out)
    except ValidationError as e:
        _fail(f"Invalid validate parameters (--cutoff {cutoff})", str(e))
        return
    except (ConfigError, KernelError, SimulationError) as e:
        _fail(f"{type(e).__name__}: {e}")
        return
    click.echo(container.report_writer.format_summary(report.to_dict()).content)
    if not report.passed:
        names = ", ".join(c.name for c in report.failed)
        click.echo(f"[FAILED] {names}", err=True)
        sys.exit(EXIT_VALIDATION_FAILED)


# CLI entry point for installable package
if __name__ == "__main__":
    main()
