"""Pytest configuration and fixtures"""

import pytest

from iimp_sim.common.enums import ModelKind
from iimp_sim.config.runtime_config import reset_runtime_config
from iimp_sim.kernel.hilbert import Ket
from iimp_sim.kernel.operators import AtomState, atom_ket, fock_state, product_state
from iimp_sim.presentation import bootstrap
from iimp_sim.services.models import ModelParams

_ENV_KEYS = ("IIMP_MAX_DIM", "IIMP_OUTPUT_DIR", "IIMP_LOG_LEVEL", "IIMP_DEFAULT_SEED")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Drop IIMP_* variables and cached singletons around every test"""
    for key in _ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    reset_runtime_config()
    bootstrap.reset()
    yield
    reset_runtime_config()
    bootstrap.reset()


@pytest.fixture
def output_env(monkeypatch, tmp_path):
    """Route default report directories into tmp_path"""
    monkeypatch.setenv("IIMP_OUTPUT_DIR", str(tmp_path / "results"))
    reset_runtime_config()
    return tmp_path / "results"


@pytest.fixture
def jc_params():
    """Default JC parameters, p = 1, cutoff 30"""
    return ModelParams(kind=ModelKind.JC, p=1, cutoff=30)


@pytest.fixture
def jc2_params():
    """JC parameters with two-photon exchange"""
    return ModelParams(kind=ModelKind.JC, p=2, cutoff=30)


@pytest.fixture
def rabi_params():
    """Default Rabi parameters, p = 1, cutoff 30"""
    return ModelParams(kind=ModelKind.RABI, p=1, cutoff=30)


@pytest.fixture
def small_jc_params():
    """JC on a small cutoff for fast propagator checks"""
    return ModelParams(kind=ModelKind.JC, p=1, cutoff=12)


def make_state(params: ModelParams, n: int, atom: AtomState | None = None) -> Ket:
    """|n> ⊗ atom on the model's composite space"""
    return product_state(fock_state(n, params.fock), atom_ket(atom or AtomState.ground()))


@pytest.fixture
def state_factory():
    """Build |n> ⊗ atom states"""
    return make_state
