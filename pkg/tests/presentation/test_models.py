"""Tests for Presentation Layer Request Models"""

import math
from pathlib import Path

import pytest
from pydantic import ValidationError

from iimp_sim.common.enums import ExperimentKind, GridSpacing, ModelKind
from iimp_sim.presentation.models import (
    AtomSpec,
    ComplexValue,
    ExperimentConfig,
    FieldSpec,
    StateSpec,
    SweepVariant,
    TimeGridSpec,
    TomographySpec,
)


def _states():
    return {
        "target_state": {"field": {"kind": "fock", "n": 6}},
        "reference_state": {"field": {"kind": "fock", "n": 3}},
    }


class TestComplexValue:
    """Tests for ComplexValue"""

    def test_value(self):
        """Test conversion to complex"""
        assert ComplexValue(re=0.5, im=-1.0).value == complex(0.5, -1.0)

    def test_non_finite(self):
        """Test non-finite parts are rejected"""
        with pytest.raises(ValidationError):
            ComplexValue(re=float("inf"))


class TestFieldSpec:
    """Tests for FieldSpec"""

    def test_fock_requires_n(self):
        """Test a number state needs n"""
        with pytest.raises(ValidationError, match="requires n"):
            FieldSpec(kind="fock")

    def test_coherent_requires_alpha(self):
        """Test a coherent state needs alpha"""
        with pytest.raises(ValidationError, match="requires alpha"):
            FieldSpec(kind="coherent")

    def test_mixture_weights(self):
        """Test mixture weights must sum to 1"""
        with pytest.raises(ValidationError, match="sum to 1"):
            FieldSpec(kind="fock_mixture", numbers=[6, 2], weights=[0.5, 0.6])

    def test_mixture_lengths(self):
        """Test one weight per photon number"""
        with pytest.raises(ValidationError, match="one weight"):
            FieldSpec(kind="fock_mixture", numbers=[6, 2], weights=[1.0])

    def test_mixture(self):
        """Test a valid mixture is flagged as mixed"""
        spec = FieldSpec(kind="fock_mixture", numbers=[6, 2], weights=[0.5, 0.5])
        assert spec.is_mixed

    def test_unknown_kind(self):
        """Test unknown field families are rejected"""
        with pytest.raises(ValidationError):
            FieldSpec(kind="thermal")


class TestAtomSpec:
    """Tests for AtomSpec"""

    def test_default_ground(self):
        """Test the default atom is |g>"""
        state = AtomSpec().to_atom_state()
        assert state.c_g == 1
        assert state.c_e == 0

    def test_amplitudes_required(self):
        """Test explicit atoms need both amplitudes"""
        with pytest.raises(ValidationError):
            AtomSpec(kind="amplitudes", c_g=ComplexValue(re=1.0))

    def test_amplitudes(self):
        """Test explicit amplitudes are carried over"""
        spec = AtomSpec(kind="amplitudes", c_g=ComplexValue(re=0.6), c_e=ComplexValue(re=0.8))
        assert spec.to_atom_state().rho_ee == pytest.approx(0.64)

    def test_extra_field_forbidden(self):
        """Test unknown keys are rejected"""
        with pytest.raises(ValidationError):
            AtomSpec(kind="ground", phase=0.3)


class TestTimeGridSpec:
    """Tests for TimeGridSpec"""

    def test_bounds(self):
        """Test t_max must exceed t_min"""
        with pytest.raises(ValidationError, match="t_max"):
            TimeGridSpec(t_min=1.0, t_max=0.5)

    def test_log_requires_positive_start(self):
        """Test log spacing needs t_min > 0"""
        with pytest.raises(ValidationError, match="log spacing"):
            TimeGridSpec(t_min=0.0, t_max=1.0, spacing=GridSpacing.LOG)

    def test_linear_from_zero(self):
        """Test linear spacing may start at zero"""
        assert TimeGridSpec(t_min=0.0, t_max=1.0, spacing=GridSpacing.LINEAR).t_min == 0.0


class TestSweepVariant:
    """Tests for SweepVariant"""

    @pytest.mark.parametrize("label", ["", "has space", "../escape", "a/b"])
    def test_label_pattern(self, label):
        """Test labels are safe directory names"""
        with pytest.raises(ValidationError):
            SweepVariant(label=label)

    def test_overrides(self):
        """Test overrides are optional"""
        variant = SweepVariant(label="tc_n10", kind=ModelKind.TC, N=10)
        assert variant.p is None
        assert variant.N == 10


class TestTomographySpec:
    """Tests for TomographySpec defaults"""

    def test_default_atom(self):
        """Test the default unknown atom is 0.6|g> + 0.8 e^{i pi/6}|e>"""
        state = TomographySpec().atom.to_atom_state()
        assert state.rho_ee == pytest.approx(0.64)
        assert state.rho_eg.real == pytest.approx(0.48 * math.cos(math.pi / 6))

    def test_reference_atom_count(self):
        """Test exactly three reference atoms"""
        with pytest.raises(ValidationError):
            TomographySpec(reference_atoms=[AtomSpec(kind="excited")])


class TestExperimentConfig:
    """Tests for ExperimentConfig"""

    def test_ratio_curves(self):
        """Test a minimal ratio-curves config"""
        config = ExperimentConfig.model_validate(
            {"experiment": "ratio-curves", "model": {"kind": "JC"}, **_states()}
        )
        assert config.experiment is ExperimentKind.RATIO_CURVES
        assert config.model.kind is ModelKind.JC
        assert isinstance(config.target_state, StateSpec)

    def test_ratio_curves_need_states(self):
        """Test ratio curves require a reference state"""
        with pytest.raises(ValidationError, match="requires target_state"):
            ExperimentConfig.model_validate(
                {
                    "experiment": "ratio-curves",
                    "model": {"kind": "JC"},
                    "target_state": {"field": {"kind": "fock", "n": 6}},
                }
            )

    def test_sweep_targets_satisfy_requirement(self):
        """Test per-variant targets replace a top-level target"""
        config = ExperimentConfig.model_validate(
            {
                "experiment": "ratio-curves",
                "model": {"kind": "JC"},
                "reference_state": {"field": {"kind": "fock", "n": 3}},
                "sweep": [{"label": "a", "target_state": {"field": {"kind": "fock", "n": 6}}}],
            }
        )
        assert config.target_state is None

    def test_unique_labels(self):
        """Test sweep labels must be unique"""
        with pytest.raises(ValidationError, match="unique"):
            ExperimentConfig.model_validate(
                {
                    "experiment": "ratio-curves",
                    "model": {"kind": "JC"},
                    **_states(),
                    "sweep": [{"label": "a"}, {"label": "a"}],
                }
            )

    def test_tomography_requires_single_photon_jc(self):
        """Test tomography refuses Rabi"""
        with pytest.raises(ValidationError, match="p = 1 JC"):
            ExperimentConfig.model_validate({"experiment": "tomography", "model": {"kind": "Rabi"}})

    def test_model_invariants_propagate(self):
        """Test model validation errors surface through the config"""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(
                {"experiment": "ratio-curves", "model": {"kind": "JC", "N": 4}, **_states()}
            )

    def test_assumptions_free_form(self):
        """Test assumptions accept arbitrary notes"""
        config = ExperimentConfig.model_validate(
            {"experiment": "tomography", "model": {"kind": "JC"}, "assumptions": {"g": "0.05"}}
        )
        assert config.assumptions == {"g": "0.05"}


_CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


class TestShippedConfigs:
    """Tests for the configs in configs/"""

    @pytest.mark.parametrize("path", sorted(_CONFIG_DIR.glob("*.json")), ids=lambda p: p.stem)
    def test_validates(self, path):
        """Test every shipped config passes the schema"""
        config = ExperimentConfig.model_validate_json(path.read_text(encoding="utf-8"))
        assert config.assumptions

    @pytest.mark.parametrize(
        "name, single, collective",
        [("dicke_ratio_curves", ModelKind.RABI, ModelKind.DICKE), ("tc_ratio_curves", ModelKind.JC, ModelKind.TC)],
    )
    def test_collective_sweeps_cover_p_and_field(self, name, single, collective):
        """Test the collective sweeps pair p = 1, 2 with number and coherent targets for both model families"""
        config = ExperimentConfig.model_validate_json((_CONFIG_DIR / f"{name}.json").read_text(encoding="utf-8"))
        covered = {
            (v.kind or config.model.kind, v.p or config.model.p, v.N or config.model.N, v.target_state.field.kind)
            for v in config.sweep
        }
        for kind, n_atoms in ((single, 1), (collective, 10)):
            for p in (1, 2):
                for field in ("fock", "coherent"):
                    assert (kind, p, n_atoms, field) in covered
