"""Tests for the instantaneous indirect measurement service"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, seed, settings
from hypothesis import strategies as st

from iimp_sim.common.enums import ModelKind, Observable
from iimp_sim.kernel.exceptions import ShapeError
from iimp_sim.kernel.hilbert import density_from_ket, mixture
from iimp_sim.kernel.operators import (
    AtomState,
    atom_ket,
    coherent_state,
    dicke_lowest,
    fock_state,
    product_state,
)
from iimp_sim.services.exceptions import (
    DegenerateReferenceError,
    OrderMismatchError,
    ParameterError,
    StepSizeError,
    UnderflowGuardError,
    UndetectableOrderError,
)
from iimp_sim.services.iimp import (
    IimpResult,
    default_t0,
    derivative_commutator_check,
    detect_order,
    indirect_estimate,
    indirect_estimate_mixed,
    quadrature_estimate,
    quadrature_probe,
    ratio_curve,
    ratio_limit_exact,
    ratio_limit_numeric,
    richardson_extrapolate,
    state_energy_scale,
    tomography_pipeline,
)
from iimp_sim.services.models import (
    ModelParams,
    build_hamiltonian,
    calibration_moment,
    excitation_number,
    probe_observable,
)


def coherent_product(params: ModelParams, alpha: complex, atom: AtomState):
    """|alpha> ⊗ atom"""
    return product_state(coherent_state(alpha, params.fock), atom_ket(atom))


class TestDetectOrder:
    """Tests for detect_order"""

    def test_jc_sigma_z_number_states(self, jc_params, state_factory):
        """Test number states with a ground atom first respond at second order"""
        h = build_hamiltonian(jc_params)
        order = detect_order(h, probe_observable(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3))
        assert order == 2

    def test_photon_number_with_phased_atom(self, jc_params):
        """Test a coherent field with (|g> + i|e>)/sqrt(2) responds at first order"""
        atom = AtomState.equator(math.pi / 2)
        h = build_hamiltonian(jc_params)
        photons = probe_observable(jc_params, Observable.PHOTON_NUMBER)
        target = coherent_product(jc_params, 1.0, atom)
        reference = coherent_product(jc_params, 2.0, atom)
        assert detect_order(h, photons, target, reference) == 1

    def test_real_phase_atom_vanishes_at_first_order(self, jc_params):
        """Test |alpha = 1> with (|g> + |e>)/sqrt(2) has no first-order photon-number change"""
        h = build_hamiltonian(jc_params)
        photons = probe_observable(jc_params, Observable.PHOTON_NUMBER)
        target = coherent_product(jc_params, 1.0, AtomState.equator(0.0))
        reference = coherent_product(jc_params, 1.0, AtomState.equator(math.pi / 2))
        with pytest.raises(OrderMismatchError) as exc_info:
            detect_order(h, photons, target, reference)
        assert exc_info.value.order == 1
        assert exc_info.value.vanished == "target"

    def test_reference_vanishes(self, jc_params):
        """Test the mismatch names the reference when it is the silent state"""
        h = build_hamiltonian(jc_params)
        photons = probe_observable(jc_params, Observable.PHOTON_NUMBER)
        target = coherent_product(jc_params, 1.0, AtomState.equator(math.pi / 2))
        reference = coherent_product(jc_params, 1.0, AtomState.equator(0.0))
        with pytest.raises(OrderMismatchError) as exc_info:
            detect_order(h, photons, target, reference)
        assert exc_info.value.vanished == "reference"

    def test_conserved_observable(self, jc_params, state_factory):
        """Test an observable commuting with H is undetectable"""
        h = build_hamiltonian(jc_params)
        with pytest.raises(UndetectableOrderError) as exc_info:
            detect_order(h, excitation_number(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3))
        assert exc_info.value.max_n == 4

    def test_max_n_validated(self, small_jc_params, state_factory):
        """Test max_n must be positive"""
        h = build_hamiltonian(small_jc_params)
        psi = state_factory(small_jc_params, 2)
        with pytest.raises(ParameterError):
            detect_order(h, probe_observable(small_jc_params), psi, psi, max_n=0)


class TestExactRatio:
    """Tests for ratio_limit_exact"""

    def test_jc(self, jc_params, state_factory):
        """Test <a†a> calibration of |6> against |3> gives 2"""
        h = build_hamiltonian(jc_params)
        ratio = ratio_limit_exact(
            h, probe_observable(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3)
        )
        assert ratio == pytest.approx(2.0, rel=1e-12)

    def test_jc_two_photon(self, jc2_params, state_factory):
        """Test <a†²a²> calibration of |6> against |3> gives 5"""
        h = build_hamiltonian(jc2_params)
        ratio = ratio_limit_exact(
            h, probe_observable(jc2_params), state_factory(jc2_params, 6), state_factory(jc2_params, 3)
        )
        assert ratio == pytest.approx(5.0, rel=1e-12)

    def test_rabi(self, rabi_params, state_factory):
        """Test the quadrature calibration of |6> against |3> gives 13/7"""
        h = build_hamiltonian(rabi_params)
        ratio = ratio_limit_exact(
            h, probe_observable(rabi_params), state_factory(rabi_params, 6), state_factory(rabi_params, 3)
        )
        assert ratio == pytest.approx(13 / 7, rel=1e-12)

    @pytest.mark.parametrize("g", [0.01, 0.05, 0.3])
    @pytest.mark.parametrize("kind, expected", [(ModelKind.JC, 2.0), (ModelKind.RABI, 13 / 7)])
    def test_independent_of_coupling(self, g, kind, expected, state_factory):
        """Test the limit does not depend on g"""
        params = ModelParams(kind=kind, p=1, cutoff=30).with_coupling(g)
        h = build_hamiltonian(params)
        ratio = ratio_limit_exact(h, probe_observable(params), state_factory(params, 6), state_factory(params, 3))
        assert ratio == pytest.approx(expected, rel=1e-10)

    @seed(3)
    @settings(max_examples=15, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=0.5), st.sampled_from([(1, 2.0), (2, 5.0)]))
    def test_coupling_scale_invariance(self, g, case):
        """Test any coupling strength leaves the JC limit at its moment ratio"""
        p, expected = case
        params = ModelParams(kind=ModelKind.JC, p=p, cutoff=12).with_coupling(g)
        h = build_hamiltonian(params)
        ground = atom_ket(AtomState.ground())
        ratio = ratio_limit_exact(
            h,
            probe_observable(params),
            product_state(fock_state(6, params.fock), ground),
            product_state(fock_state(3, params.fock), ground),
        )
        assert ratio == pytest.approx(expected, rel=1e-9)


class TestCrossModel:
    """Tests that N = 10 collective models reproduce the single-atom limits"""

    @staticmethod
    def _scaled_limit(params: ModelParams, target_field) -> float:
        atom = dicke_lowest(params.N) if params.kind.is_collective else atom_ket(AtomState.ground())
        reference_field = fock_state(3, params.fock)
        ratio = ratio_limit_exact(
            build_hamiltonian(params),
            probe_observable(params),
            product_state(target_field, atom),
            product_state(reference_field, atom),
        )
        return ratio * calibration_moment(params, reference_field)

    @pytest.mark.parametrize(
        "single, collective, p, field, expected",
        [
            (ModelKind.RABI, ModelKind.DICKE, 1, "fock", 13.0),
            (ModelKind.RABI, ModelKind.DICKE, 2, "fock", 86.0),
            (ModelKind.RABI, ModelKind.DICKE, 1, "coherent", 25.0),
            (ModelKind.RABI, ModelKind.DICKE, 2, "coherent", 170.0),
            (ModelKind.JC, ModelKind.TC, 1, "fock", 6.0),
            (ModelKind.JC, ModelKind.TC, 2, "fock", 30.0),
            (ModelKind.JC, ModelKind.TC, 1, "coherent", 6.0),
            (ModelKind.JC, ModelKind.TC, 2, "coherent", 36.0),
        ],
    )
    def test_scaled_limits_agree(self, single, collective, p, field, expected):
        """Test the single-atom and ten-atom models reach the same scaled limit"""
        one = ModelParams(kind=single, p=p, cutoff=40)
        many = ModelParams(kind=collective, p=p, N=10, cutoff=40)

        def target(params):
            if field == "fock":
                return fock_state(6, params.fock)
            return coherent_state(math.sqrt(6), params.fock)

        single_limit = self._scaled_limit(one, target(one))
        collective_limit = self._scaled_limit(many, target(many))
        assert single_limit == pytest.approx(expected, rel=1e-10)
        assert collective_limit == pytest.approx(single_limit, rel=1e-10)


class TestNumericRatio:
    """Tests for ratio_limit_numeric"""

    def test_jc_matches_exact(self, jc_params, state_factory):
        """Test the extrapolated JC ratio reaches 2"""
        h = build_hamiltonian(jc_params)
        numeric = ratio_limit_numeric(
            h, probe_observable(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3)
        )
        assert numeric.ratio == pytest.approx(2.0, abs=1e-6)
        assert len(numeric.times) == 6
        assert numeric.times[0] == pytest.approx(2 * numeric.times[1])

    def test_rabi_matches_exact(self, rabi_params, state_factory):
        """Test the extrapolated Rabi ratio reaches 13/7"""
        h = build_hamiltonian(rabi_params)
        numeric = ratio_limit_numeric(
            h, probe_observable(rabi_params), state_factory(rabi_params, 6), state_factory(rabi_params, 3)
        )
        assert numeric.ratio == pytest.approx(13 / 7, abs=1e-6)

    def test_jc_two_photon(self, jc2_params, state_factory):
        """Test the extrapolated p = 2 JC ratio reaches 5"""
        h = build_hamiltonian(jc2_params)
        numeric = ratio_limit_numeric(
            h, probe_observable(jc2_params), state_factory(jc2_params, 6), state_factory(jc2_params, 3)
        )
        assert numeric.ratio == pytest.approx(5.0, abs=1e-6)

    def test_jc_two_photon_coherent(self):
        """Test |sqrt 6> against |3> at p = 2 reaches 6, scaled 36"""
        params = ModelParams(kind=ModelKind.JC, p=2, cutoff=60)
        reference_field = fock_state(3, params.fock)
        numeric = ratio_limit_numeric(
            build_hamiltonian(params),
            probe_observable(params),
            coherent_product(params, math.sqrt(6), AtomState.ground()),
            product_state(reference_field, atom_ket(AtomState.ground())),
        )
        assert numeric.ratio == pytest.approx(6.0, abs=1e-5)
        assert calibration_moment(params, reference_field) == pytest.approx(6.0)
        assert numeric.ratio * calibration_moment(params, reference_field) == pytest.approx(36.0, abs=1e-4)

    def test_levels_validated(self, small_jc_params, state_factory):
        """Test fewer than three levels are refused"""
        h = build_hamiltonian(small_jc_params)
        psi = state_factory(small_jc_params, 2)
        with pytest.raises(ParameterError) as exc_info:
            ratio_limit_numeric(h, probe_observable(small_jc_params), psi, psi, levels=2)
        assert exc_info.value.field == "levels"

    def test_t0_too_large(self, small_jc_params, state_factory):
        """Test t0 beyond the energy-scale limit is refused"""
        h = build_hamiltonian(small_jc_params)
        psi = state_factory(small_jc_params, 4)
        with pytest.raises(ParameterError) as exc_info:
            ratio_limit_numeric(h, probe_observable(small_jc_params), psi, psi, t0=1.0)
        assert exc_info.value.field == "t0"

    def test_underflow_guard(self, small_jc_params, state_factory):
        """Test an unresolvable reference change is refused"""
        h = build_hamiltonian(small_jc_params)
        psi = state_factory(small_jc_params, 4)
        with pytest.raises(UnderflowGuardError) as exc_info:
            ratio_limit_numeric(h, probe_observable(small_jc_params), psi, psi, t0=1e-12)
        assert abs(exc_info.value.smallest_change) < 1e-20

    def test_default_t0(self, small_jc_params, state_factory):
        """Test the default ladder starts at 1e-2 over the energy scale"""
        h = build_hamiltonian(small_jc_params)
        psi, psir = state_factory(small_jc_params, 6), state_factory(small_jc_params, 3)
        assert default_t0(h, psi, psir) * state_energy_scale(h, psi, psir) == pytest.approx(1e-2)

    def test_mixed_energy_scale(self, small_jc_params, state_factory):
        """Test a pure state's density matrix has the same energy scale"""
        h = build_hamiltonian(small_jc_params)
        psi = state_factory(small_jc_params, 5)
        rho = density_from_ket(psi)
        assert state_energy_scale(h, rho, rho) == pytest.approx(state_energy_scale(h, psi, psi))


class TestRichardson:
    """Tests for richardson_extrapolate"""

    def test_polynomial_exact(self):
        """Test a quadratic in h is extrapolated exactly from three levels"""
        values = [1 + 2 * h + 3 * h**2 for h in (1.0, 0.5, 0.25)]
        value, error = richardson_extrapolate(values)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert error >= 0.0

    def test_even_power(self):
        """Test power 2 removes only even error terms"""
        values = [5 + h**2 + h**4 for h in (0.4, 0.2, 0.1)]
        value, _ = richardson_extrapolate(values, power=2)
        assert value == pytest.approx(5.0, abs=1e-12)

    def test_constant(self):
        """Test constant data is returned with zero error"""
        assert richardson_extrapolate([3.0, 3.0, 3.0]) == (3.0, 0.0)

    def test_too_few_values(self):
        """Test a single value cannot be extrapolated"""
        with pytest.raises(ParameterError):
            richardson_extrapolate([1.0])


class TestIndirectEstimate:
    """Tests for calibrated indirect estimates"""

    def test_pure(self, jc_params, state_factory):
        """Test estimate = reference_value * numeric ratio"""
        h = build_hamiltonian(jc_params)
        result = indirect_estimate(
            h, probe_observable(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3), reference_value=3.0
        )
        assert result.order_n == 2
        assert result.estimate == pytest.approx(6.0, abs=1e-5)
        assert result.estimate == result.reference_value * result.ratio_numeric
        assert result.converged
        assert result.warnings == ()

    def test_default_reference_value(self, jc_params, state_factory):
        """Test the reference commutator expectation is used without a known value"""
        h = build_hamiltonian(jc_params)
        result = indirect_estimate(h, probe_observable(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3))
        assert result.reference_value != 0.0
        assert result.ratio_exact == pytest.approx(2.0)

    def test_mixed(self, jc_params, state_factory):
        """Test an equal mixture of |6> and |2> reads 4 against |3> valued 3"""
        h = build_hamiltonian(jc_params)
        rho = mixture([0.5, 0.5], [state_factory(jc_params, 6), state_factory(jc_params, 2)])
        rhor = density_from_ket(state_factory(jc_params, 3))
        result = indirect_estimate_mixed(h, probe_observable(jc_params), rho, rhor, reference_value=3.0)
        assert result.estimate == pytest.approx(4.0, abs=1e-5)

    def test_reference_independent(self, jc_params, state_factory):
        """Test |3> valued 3 and |alpha = 1> valued 1 calibrate |6> to the same estimate"""
        h = build_hamiltonian(jc_params)
        a = probe_observable(jc_params)
        target = state_factory(jc_params, 6)
        number = indirect_estimate(h, a, target, state_factory(jc_params, 3), reference_value=3.0)
        coherent = indirect_estimate(
            h, a, target, coherent_product(jc_params, 1.0, AtomState.ground()), reference_value=1.0
        )
        assert number.estimate == pytest.approx(6.0, abs=1e-5)
        assert coherent.estimate == pytest.approx(number.estimate, abs=1e-5)

    def test_zero_reference_value(self, jc_params, state_factory):
        """Test a zero known value cannot calibrate"""
        h = build_hamiltonian(jc_params)
        with pytest.raises(DegenerateReferenceError):
            indirect_estimate(
                h, probe_observable(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3), reference_value=0.0
            )

    def test_result_to_dict(self):
        """Test the serialized result keeps every field"""
        result = IimpResult(2, 2.0, 2.00001, 1e-8, 6.00003, 3.0, ("note",))
        data = result.to_dict()
        assert data["order_n"] == 2
        assert data["warnings"] == ["note"]
        assert not result.converged


class TestDerivativeCheck:
    """Tests for derivative_commutator_check"""

    def test_first_order(self, jc_params):
        """Test the first derivative of <a†a> matches the commutator"""
        h = build_hamiltonian(jc_params)
        psi = coherent_product(jc_params, 1.0, AtomState.equator(math.pi / 2))
        check = derivative_commutator_check(h, probe_observable(jc_params, Observable.PHOTON_NUMBER), psi, 1, 1e-3)
        assert abs(check.commutator_value) > 1e-3
        assert check.abs_diff < 1e-8

    def test_second_order(self, jc_params, state_factory):
        """Test the second derivative of <sigma_z> matches the commutator"""
        h = build_hamiltonian(jc_params)
        check = derivative_commutator_check(h, probe_observable(jc_params), state_factory(jc_params, 6), 2, 1e-2)
        assert check.abs_diff < 1e-7
        assert check.step_ok

    def test_commuting_observable(self, small_jc_params, state_factory):
        """Test a conserved observable gives zero both ways"""
        h = build_hamiltonian(small_jc_params)
        check = derivative_commutator_check(
            h, excitation_number(small_jc_params), state_factory(small_jc_params, 3), 1, 1e-3
        )
        assert check.commutator_value == pytest.approx(0.0, abs=1e-12)
        assert check.fd_value == pytest.approx(0.0, abs=1e-9)

    def test_unsupported_order(self, small_jc_params, state_factory):
        """Test stencils stop at third order"""
        h = build_hamiltonian(small_jc_params)
        with pytest.raises(ParameterError):
            derivative_commutator_check(h, probe_observable(small_jc_params), state_factory(small_jc_params, 3), 4, 1e-3)

    def test_invalid_step(self, small_jc_params, state_factory):
        """Test a non-positive step is refused"""
        h = build_hamiltonian(small_jc_params)
        with pytest.raises(StepSizeError):
            derivative_commutator_check(h, probe_observable(small_jc_params), state_factory(small_jc_params, 3), 1, 0.0)


class TestQuadrature:
    """Tests for the indirect quadrature measurement"""

    def test_probe_state(self):
        """Test the probe amplitudes"""
        probe = quadrature_probe(0.0)
        assert probe.c_g == pytest.approx(1 / math.sqrt(2))
        assert probe.c_e == pytest.approx(-1j / math.sqrt(2))

    @pytest.mark.parametrize("theta", [0.0, 0.3, 2.0])
    def test_coherent_field(self, jc_params, theta):
        """Test <X(theta)> of a coherent field is recovered"""
        alpha = 1.2 * np.exp(0.4j)
        target = coherent_state(alpha, jc_params.fock)
        reference = coherent_state(1.0 * np.exp(1j * theta), jc_params.fock)
        estimate = quadrature_estimate(theta, jc_params, target, reference)
        assert estimate == pytest.approx(math.sqrt(2) * 1.2 * math.cos(theta - 0.4), abs=1e-4)

    @seed(9)
    @settings(max_examples=10, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=2 * math.pi),
        st.floats(min_value=0.5, max_value=1.5),
        st.floats(min_value=0.0, max_value=2 * math.pi),
    )
    def test_half_turn_flips_sign(self, theta, magnitude, phase):
        """Test <X(theta + pi)> = -<X(theta)>"""
        assume(abs(math.cos(theta - phase)) > 0.2)
        params = ModelParams(kind=ModelKind.JC, p=1, cutoff=20)
        target = coherent_state(magnitude * np.exp(1j * phase), params.fock)
        reference = coherent_state(np.exp(1j * theta), params.fock)
        forward = quadrature_estimate(theta, params, target, reference)
        backward = quadrature_estimate(theta + math.pi, params, target, reference)
        assert backward == pytest.approx(-forward, abs=1e-7)
        assert forward == pytest.approx(math.sqrt(2) * magnitude * math.cos(theta - phase), abs=1e-4)

    def test_zero_mean_reference(self, jc_params):
        """Test a number-state reference has no quadrature to calibrate against"""
        target = coherent_state(1.0, jc_params.fock)
        with pytest.raises(DegenerateReferenceError):
            quadrature_estimate(0.0, jc_params, target, fock_state(3, jc_params.fock))

    def test_requires_single_photon_jc(self, rabi_params):
        """Test Rabi is refused"""
        field = coherent_state(1.0, rabi_params.fock)
        with pytest.raises(ParameterError):
            quadrature_estimate(0.0, rabi_params, field, field)

    def test_field_dimension(self, jc_params):
        """Test field states must match the cutoff"""
        field = coherent_state(1.0, ModelParams(kind=ModelKind.JC, cutoff=20).fock)
        with pytest.raises(ShapeError):
            quadrature_estimate(0.0, jc_params, field, field)


class TestRatioCurve:
    """Tests for ratio_curve"""

    def test_curve_columns(self, jc_params, state_factory):
        """Test the ratio, its scaling and a NaN fidelity without a reference atom"""
        h = build_hamiltonian(jc_params)
        curve = ratio_curve(
            h, probe_observable(jc_params), state_factory(jc_params, 6), state_factory(jc_params, 3), [0.0, 1e-3, 1.0], scale=3.0
        )
        assert math.isnan(curve.ratio[0])
        assert curve.ratio[1] == pytest.approx(2.0, rel=1e-5)
        np.testing.assert_allclose(curve.scaled_ratio[1:], 3.0 * curve.ratio[1:])
        assert np.all(np.isnan(curve.fidelity))

    def test_fidelity(self, jc_params, state_factory):
        """Test the atomic fidelity starts at 1 for the initial atom"""
        h = build_hamiltonian(jc_params)
        curve = ratio_curve(
            h,
            probe_observable(jc_params),
            state_factory(jc_params, 6),
            state_factory(jc_params, 3),
            [0.0, 0.5],
            atom_reference=atom_ket(AtomState.ground()),
            dims=(jc_params.cutoff, 2),
        )
        assert curve.fidelity[0] == pytest.approx(1.0)
        assert curve.fidelity[1] < 1.0

    def test_fidelity_needs_dims(self, small_jc_params, state_factory):
        """Test fidelity without dimensions is refused"""
        h = build_hamiltonian(small_jc_params)
        psi = state_factory(small_jc_params, 3)
        with pytest.raises(ShapeError):
            ratio_curve(h, probe_observable(small_jc_params), psi, psi, [0.1], atom_reference=atom_ket(AtomState.ground()))


class TestTomography:
    """Tests for the three-stage atomic tomography"""

    @pytest.fixture
    def atom(self):
        """0.6|g> + 0.8 e^{i pi/6}|e>"""
        return AtomState(0.6, 0.8 * complex(math.cos(math.pi / 6), math.sin(math.pi / 6)))

    def test_reconstruction(self, jc_params, atom):
        """Test the reconstructed density matrix matches the prepared atom"""
        result = tomography_pipeline(jc_params, atom)
        assert result.max_abs_error < 5e-3
        assert [s.name for s in result.stages] == ["stage0", "stage1", "stage2"]
        assert result.density_matrix[0, 0] == pytest.approx(0.64, abs=5e-3)
        assert np.trace(result.density_matrix).real == pytest.approx(1.0)
        assert math.isnan(result.min_fidelity)

    def test_window_curves(self, jc_params, atom):
        """Test curves are produced on the requested window"""
        result = tomography_pipeline(jc_params, atom, window=np.linspace(1e-5, 2e-3, 5))
        assert all(s.curve is not None and s.curve.times.size == 5 for s in result.stages)
        assert 0.99 < result.min_fidelity <= 1.0 + 1e-12

    def test_ground_atom_has_no_coherence(self, jc_params):
        """Test a ground atom reconstructs to |g><g|"""
        result = tomography_pipeline(jc_params, AtomState.ground())
        assert result.max_abs_error < 1e-2

    def test_requires_coupling(self, jc_params, atom):
        """Test g = 0 is refused"""
        with pytest.raises(ParameterError):
            tomography_pipeline(jc_params.with_coupling(0.0), atom)

    def test_reference_atom_count(self, jc_params, atom):
        """Test exactly three reference atoms are required"""
        with pytest.raises(ParameterError):
            tomography_pipeline(jc_params, atom, reference_atoms=[AtomState.excited()])
