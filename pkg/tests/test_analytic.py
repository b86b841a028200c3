import math

import numpy as np
import pytest


from superlum.analytic import (
    CovarianceState,
    QuadraticModelSpec,
    bessel_coefficients,
    bessel_j_pi_half,
    bessel_j_series,
    dicke_mapping,
    gaussian_evolve,
    normal_mode_analysis,
    perturbative_probability,
    qubits_for_velocity,
    resonance_velocity,
    thermal_occupation,
)
from superlum.errors import DimensionError, DomainError
from superlum.hamiltonian import RabiParams, critical_coupling, velocity_to_coupling
from superlum.trajectory import QubitTrajectory


def bessel_integral_oracle(order: int, x: float) -> float:
    """Independent check: J_n(x) = (1/pi) int_0^pi cos(n tau - x sin tau) dtau.

    Fixed-order Gauss-Legendre: the integrand is smooth, 80 nodes give
    machine precision without adaptive-quadrature roundoff noise."""
    nodes, weights = np.polynomial.legendre.leggauss(80)
    tau = 0.5 * math.pi * (nodes + 1.0)
    vals = np.cos(order * tau - x * np.sin(tau))
    return float(0.5 * np.dot(weights, vals))


class TestBessel:
    def test_j1_value(self):
        # frozen from the power series; 0.56682408890587...
        assert bessel_j_pi_half(1) == pytest.approx(0.5668240889058739, abs=1e-14)

    @pytest.mark.parametrize("order", [0, 1, 2, 3, 5, 9])
    def test_series_against_integral_representation(self, order):
        series = bessel_j_series(order, math.pi / 2)
        oracle = bessel_integral_oracle(order, math.pi / 2)
        assert series == pytest.approx(oracle, abs=1e-12)

    def test_single_term_dominance(self):
        exp = bessel_coefficients(1)
        assert exp.values[1] / exp.values[0] < 0.13

    def test_expansion_completeness(self):
        exp = bessel_coefficients(10)
        assert exp.sup_error < 1e-12

    def test_truncation_error_decreases(self):
        errs = [bessel_coefficients(k).sup_error for k in range(4)]
        assert all(errs[i + 1] < errs[i] for i in range(3))

    def test_coefficient_signs(self):
        exp = bessel_coefficients(2)
        # -2(-1)^k J_{2k+1}: alternating starting negative
        assert exp.coefficients[0] < 0 < exp.coefficients[1]
        assert exp.coefficients[2] < 0


class TestPerturbative:
    def test_static_node_zero(self):
        # the integrand carries cos(pi/2), zero to machine rounding
        p = RabiParams(omega_q=1.0, g=0.002, n_max=4)
        res = perturbative_probability(p, QubitTrajectory("static", x0=0.5), 20.0)
        assert abs(res.quadrature) < 1e-30
        assert abs(res.closed_form) < 1e-30

    def test_resonance_value(self):
        # at Delta = kv with x0 = 0: P_e = g^2 |T/2 + (e^{2i Delta T}-1)/(4i Delta)|^2,
        # which is g^2 T^2/4 = 2.5e-3 up to a < 1% correction
        p = RabiParams(omega_q=1.0, g=0.002, n_max=4)
        traj = QubitTrajectory("constant-velocity", v=2.0)
        res = perturbative_probability(p, traj, 50.0)
        delta = 2.0
        hand = p.g**2 * abs(25.0 + (np.exp(2j * delta * 50.0) - 1.0) / (4j * delta)) ** 2
        assert res.quadrature == pytest.approx(hand, rel=1e-9)
        assert res.quadrature == pytest.approx(p.g**2 * 50.0**2 / 4.0, rel=0.01)

    def test_closed_form_matches_quadrature_randomized(self):
        rng = np.random.default_rng(7)
        p = RabiParams(omega_q=1.0, g=0.002, n_max=4)
        for _ in range(25):
            traj = QubitTrajectory("constant-velocity",
                                   x0=float(rng.uniform(0, 1)),
                                   v=float(rng.uniform(0.2, 4.0)))
            T = float(rng.uniform(5.0, 40.0))
            res = perturbative_probability(p, traj, T)
            assert res.quadrature == pytest.approx(res.closed_form, rel=1e-8)

    def test_phase_periodicity_in_x0(self):
        p = RabiParams(omega_q=1.3, g=0.002, n_max=4)
        t1 = QubitTrajectory("constant-velocity", x0=0.3, v=1.7)
        t2 = QubitTrajectory("constant-velocity", x0=2.3, v=1.7)  # x0 + 2L
        r1 = perturbative_probability(p, t1, 17.0)
        r2 = perturbative_probability(p, t2, 17.0)
        assert r1.quadrature == pytest.approx(r2.quadrature, rel=1e-10)

    def test_warns_for_large_coupling(self):
        p = RabiParams(omega_q=1.0, g=0.2, n_max=4)
        with pytest.warns(UserWarning):
            perturbative_probability(p, QubitTrajectory("static"), 5.0)


class TestResonanceVelocity:
    def test_resonant_case(self):
        assert resonance_velocity(1.0, 1.0) == pytest.approx(2.0)

    def test_limit_small_qubit_frequency(self):
        assert resonance_velocity(1e-9, 1.0) == pytest.approx(1.0, abs=1e-8)

    def test_half_detuned(self):
        assert resonance_velocity(0.5, 1.0) == pytest.approx(1.5)


class TestGaussian:
    def test_vacuum_stays_empty_without_coupling(self):
        spec = QuadraticModelSpec.from_coupling("dicke-form", 0.0, kappa=(0.0, 0.0))
        series, final = gaussian_evolve(spec, np.linspace(0, 10, 101))
        assert np.abs(series.tracks["n_total"]).max() < 1e-12
        assert np.allclose(final.cov, 0.5 * np.eye(4), atol=1e-12)

    def test_thermal_photon_decay(self):
        kappa = 0.13
        spec = QuadraticModelSpec.from_coupling("dicke-form", 0.0, kappa=(kappa, 0.0))
        t = np.linspace(0, 15, 61)
        series, _ = gaussian_evolve(spec, t, initial=CovarianceState.thermal((1.0, 0.0)))
        assert np.abs(series.tracks["n1"] - np.exp(-kappa * t)).max() < 1e-10

    def test_photon_numbers_nonnegative_and_bounded_when_stable(self):
        spec = QuadraticModelSpec.from_coupling("dicke-form", 0.5 * critical_coupling(),
                                                kappa=(0.0, 0.0))
        series, _ = gaussian_evolve(spec, np.linspace(0, 50, 501))
        nt = series.tracks["n_total"]
        assert nt.min() > -1e-12
        assert nt.max() < 10.0

    def test_uncertainty_validated(self):
        with pytest.raises(DimensionError):
            CovarianceState(np.zeros(4), 0.1 * np.eye(4))  # below vacuum noise


class TestNormalModes:
    def test_uncoupled_frequencies(self):
        spec = QuadraticModelSpec.from_coupling("dicke-form", 0.0)
        rep = normal_mode_analysis(spec)
        assert rep.stable
        assert rep.frequencies == pytest.approx((1.0, 2.0), abs=1e-12)

    def test_soft_mode_near_transition(self):
        rep = normal_mode_analysis(
            QuadraticModelSpec.from_coupling("dicke-form", 0.999 * critical_coupling()))
        assert rep.stable
        assert rep.frequencies[0] < 0.05

    def test_unstable_above_transition(self):
        rep = normal_mode_analysis(
            QuadraticModelSpec.from_coupling("dicke-form", 1.01 * critical_coupling()))
        assert not rep.stable

    def test_dicke_frequencies_closed_form(self):
        # nu^2 = ((w1^2+w2^2) +- sqrt((w1^2-w2^2)^2 + 16 O^2 w1 w2))/2
        for om in [0.1, 0.3, 0.6]:
            rep = normal_mode_analysis(QuadraticModelSpec.from_coupling("dicke-form", om))
            disc = math.sqrt(9.0 + 32.0 * om * om)
            lo = math.sqrt((5.0 - disc) / 2.0)
            hi = math.sqrt((5.0 + disc) / 2.0)
            assert rep.frequencies == pytest.approx((lo, hi), rel=1e-10)

    def test_frequency_continuity(self):
        omegas = np.linspace(0.0, 0.69, 140)
        freqs = [normal_mode_analysis(QuadraticModelSpec.from_coupling("dicke-form", o)).frequencies[0]
                 for o in omegas]
        jumps = np.abs(np.diff(freqs))
        d_omega = omegas[1] - omegas[0]
        # soft-mode slope diverges at the transition; stay clear of it and
        # bound the increment by 10x the parameter step far from threshold
        assert jumps[: int(0.9 * len(jumps))].max() < 10 * d_omega

    def test_literal_variant_window(self):
        # the literal two-mode restriction destabilizes on (1/(2 sqrt 2), 1/sqrt 2)
        inside = normal_mode_analysis(QuadraticModelSpec.from_coupling("literal-eq13", 0.5))
        below = normal_mode_analysis(QuadraticModelSpec.from_coupling("literal-eq13", 0.3))
        above = normal_mode_analysis(QuadraticModelSpec.from_coupling("literal-eq13", 0.75))
        assert not inside.stable
        assert below.stable
        assert above.stable


class TestDickeMapping:
    def test_single_qubit(self):
        assert dicke_mapping(1, 0.17) == pytest.approx(0.17)

    def test_quadrupling_doubles_coupling(self):
        g1 = 0.03
        assert dicke_mapping(4 * 25, g1) == pytest.approx(2.0 * dicke_mapping(25, g1), rel=1e-14)

    def test_twenty_qubits_reach_critical(self):
        omega_c = critical_coupling(math.pi)  # L = 1, c = 1 units
        g1 = omega_c / math.sqrt(20.0)
        assert qubits_for_velocity(3 * math.pi / 2, g1) == 20

    @pytest.mark.parametrize("n", [1, 4, 9, 36, 100])
    def test_round_trip_exact_squares(self, n):
        g1 = 0.011
        omega = dicke_mapping(n, g1)
        v = omega * 3.0 / math.sqrt(2.0)  # coupling_to_velocity at L = c = 1
        assert qubits_for_velocity(v, g1) == n

    def test_input_validation(self):
        with pytest.raises(DomainError):
            dicke_mapping(0, 0.1)
        with pytest.raises(DomainError):
            qubits_for_velocity(1.0, -0.1)


class TestThermalFloor:
    def test_zero_temperature(self):
        assert thermal_occupation(5.0, 0.0) == 0.0

    def test_typical_mode_at_100mk(self):
        # ~5 GHz mode at 100 mK sits near 0.1 photons
        assert thermal_occupation(5.0, 100.0) == pytest.approx(0.1, abs=0.02)
