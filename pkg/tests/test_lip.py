from __future__ import annotations

import math
import random

import pytest

from telewalk.lip import (
    ClosedFormCoeffs,
    LipParams,
    PlanarState,
    closed_form_coeffs,
    closed_form_passive,
    contact_force,
    dcm,
    lip_accel,
    normalized_dcm_gap,
    normalized_dcm_rate_gap,
    orbital_slope,
    state_from_coeffs,
)

from .conftest import coth_ref, rk4_free


class TestLipParams:
    def test_omega_derived_from_g_and_h(self, human):
        assert human.omega == pytest.approx(math.sqrt(9.81 / 1.2), rel=0, abs=0)

    @pytest.mark.parametrize("h", [0.3, 0.55, 1.2, 2.0])
    def test_height_times_omega_sq_is_gravity(self, h):
        p = LipParams(mass=1.0, com_height=h)
        assert abs(h * p.omega_sq - 9.81) <= 1e-12 * 9.81

    @pytest.mark.parametrize("kwargs", [
        dict(mass=0.0, com_height=1.0),
        dict(mass=-1.0, com_height=1.0),
        dict(mass=1.0, com_height=0.0),
        dict(mass=1.0, com_height=1.0, gravity=-9.81),
        dict(mass=float("nan"), com_height=1.0),
    ])
    def test_rejects_bad_constants(self, kwargs):
        with pytest.raises(ValueError):
            LipParams(**kwargs)

    def test_planar_state_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PlanarState(float("inf"), 0.0)


class TestAccelAndForce:
    def test_accel_example(self, human):
        # omega^2 = 8.175 for the human pendulum
        assert lip_accel(PlanarState(0.1, 0.0), 0.0, human) == pytest.approx(0.8175, abs=1e-12)

    def test_accel_zero_at_cop(self, human):
        assert lip_accel(PlanarState(0.3, 1.0), 0.3, human) == 0.0

    def test_accel_negative_offset(self, robot):
        got = lip_accel(PlanarState(0.0, 0.0), 0.05, robot)
        assert got == pytest.approx(-0.8918181818181818, abs=1e-12)

    def test_force_examples(self, human, robot):
        assert contact_force(PlanarState(0.05, 0.0), 0.0, human) == pytest.approx(30.65625, abs=1e-9)
        assert contact_force(PlanarState(0.3, 0.0), 0.3, human) == 0.0
        assert contact_force(PlanarState(0.02, 0.0), 0.01, robot) == pytest.approx(
            3.6029454545454542, abs=1e-12
        )

    def test_force_is_mass_times_accel(self, robot):
        state = PlanarState(0.037, -0.2)
        assert contact_force(state, 0.011, robot) == pytest.approx(
            robot.mass * lip_accel(state, 0.011, robot), rel=1e-15
        )


class TestClosedForm:
    def test_equilibrium_stays_put(self, human):
        out = closed_form_passive(PlanarState(0.0, 0.0), human, 1.7)
        assert out.x == 0.0 and out.xdot == 0.0

    def test_pure_stable_mode(self, human):
        w = human.omega
        out = closed_form_passive(PlanarState(0.1, -0.1 * w), human, 0.6)
        assert out.x == pytest.approx(0.1 * math.exp(-w * 0.6), rel=1e-12)
        assert out.xdot == pytest.approx(-0.1 * w * math.exp(-w * 0.6), rel=1e-12)

    def test_matches_independent_integrator(self, human):
        # dt = 1 ms over 0.3 s from an end-of-step-like state
        x0, v0 = 0.014397210598990915, 0.10179534204647601
        xi, vi = rk4_free(x0, v0, human.omega_sq, 1e-3, 300)
        out = closed_form_passive(PlanarState(x0, v0), human, 0.3)
        assert abs(out.x - xi) <= 1e-8
        assert abs(out.xdot - vi) <= 1e-8

    def test_one_second_integration_agreement(self, human):
        x0, v0 = 0.03, -0.05
        xi, vi = rk4_free(x0, v0, human.omega_sq, 1e-3, 1000)
        out = closed_form_passive(PlanarState(x0, v0), human, 1.0)
        assert abs(out.x - xi) <= 1e-8
        assert abs(out.xdot - vi) <= 1e-7

    def test_rejects_negative_time(self, human):
        with pytest.raises(ValueError):
            closed_form_passive(PlanarState(0.0, 0.0), human, -0.1)

    def test_coeffs_round_trip_exactly(self, human):
        rng = random.Random(3)
        for _ in range(50):
            st = PlanarState(rng.uniform(-0.2, 0.2), rng.uniform(-0.5, 0.5))
            c = closed_form_coeffs(st, human)
            back = state_from_coeffs(c, human)
            assert back.x == pytest.approx(st.x, rel=0, abs=1e-16)
            assert back.xdot == pytest.approx(st.xdot, rel=1e-15)

    def test_coeffs_reconstruction_identity(self, human):
        c = ClosedFormCoeffs(0.01, -0.004)
        st = state_from_coeffs(c, human)
        assert st.x == c.c1 + c.c2
        assert st.xdot == human.omega * (c.c1 - c.c2)


class TestDcm:
    def test_example_value(self, robot):
        assert dcm(PlanarState(0.1, 0.2), robot) == pytest.approx(
            0.14735619898238375, abs=1e-14
        )

    def test_zero_on_stable_eigenline(self, human):
        assert dcm(PlanarState(0.1, -0.1 * human.omega), human) == pytest.approx(0.0, abs=1e-17)
        assert dcm(PlanarState(0.0, 0.0), human) == 0.0

    def test_exponential_growth_along_passive_flow(self, human):
        st0 = PlanarState(0.02, 0.07)
        xi0 = dcm(st0, human)
        for t in (0.1, 0.5, 1.0, 2.0):
            xi_t = dcm(closed_form_passive(st0, human, t), human)
            assert xi_t == pytest.approx(xi0 * math.exp(human.omega * t), rel=1e-10)

    def test_orbital_energy_constant_along_flow(self, human):
        st0 = PlanarState(0.1, 0.02)
        w2 = human.omega_sq
        e0 = st0.xdot**2 - w2 * st0.x**2
        for t in (0.25, 0.5, 1.0, 1.5, 2.0):
            st = closed_form_passive(st0, human, t)
            e = st.xdot**2 - w2 * st.x**2
            assert e == pytest.approx(e0, rel=1e-9)


class TestOrbitalSlope:
    def test_reference_values(self, human):
        assert orbital_slope(0.3, human).slope == pytest.approx(7.070490588893014, rel=1e-12)
        assert orbital_slope(0.4, human).slope == pytest.approx(5.533477295850523, rel=1e-12)

    def test_matches_naive_coth(self, human):
        for t in (0.05, 0.2, 0.45, 0.8, 3.0):
            expected = human.omega * coth_ref(0.5 * t * human.omega)
            assert orbital_slope(t, human).slope == pytest.approx(expected, rel=1e-12)

    def test_always_above_omega(self, robot):
        rng = random.Random(11)
        for _ in range(100):
            t = rng.uniform(0.05, 5.0)
            assert orbital_slope(t, robot).slope > robot.omega

    def test_long_step_limit_is_omega(self, human):
        assert orbital_slope(1e6, human).slope == pytest.approx(human.omega, rel=1e-15)

    @pytest.mark.parametrize("t", [0.0, -0.2])
    def test_rejects_non_positive_step_time(self, t, human):
        with pytest.raises(ValueError):
            orbital_slope(t, human)

    def test_rejects_degenerate_argument(self, human):
        with pytest.raises(ValueError):
            orbital_slope(1e-10, human)

    def test_p1_orbit_closure(self, human):
        # boundary states on the orbital lines map onto each other in one step
        rng = random.Random(42)
        for _ in range(100):
            x_minus = rng.uniform(0.005, 0.05)
            t_s = rng.uniform(0.2, 0.6)
            slope = orbital_slope(t_s, human).slope
            start = PlanarState(-x_minus, slope * x_minus)
            end = closed_form_passive(start, human, t_s)
            assert abs(end.x - x_minus) <= 1e-9
            assert abs(end.xdot - slope * x_minus) <= 1e-9


class TestNormalizedGaps:
    def test_gap_zero_at_origin(self, human, robot):
        z = PlanarState(0.0, 0.0)
        assert normalized_dcm_gap(z, human, z, robot) == 0.0

    def test_gap_zero_under_similarity(self, human, robot):
        # states constructed with equal normalized DCM
        a = PlanarState(0.05, 0.0)
        xi_b = (dcm(a, human) / human.com_height) * robot.com_height
        b = PlanarState(xi_b, 0.0)
        assert normalized_dcm_gap(a, human, b, robot) == pytest.approx(0.0, abs=1e-15)

    def test_gap_example(self, human, robot):
        a = PlanarState(0.05, 0.0)
        b = PlanarState(0.0, 0.0)
        assert normalized_dcm_gap(a, human, b, robot) == pytest.approx(0.05 / 1.2, rel=1e-12)

    def test_rate_gap_zero_for_matched_scaling(self, human, robot):
        for k in (-0.4, 0.0, 1.7):
            ra = human.com_height * human.omega * k
            rb = robot.com_height * robot.omega * k
            assert normalized_dcm_rate_gap(ra, human, rb, robot) == pytest.approx(0.0, abs=1e-15)

    def test_rate_gap_example(self, human, robot):
        got = normalized_dcm_rate_gap(0.2, human, 0.0, robot)
        assert got == pytest.approx(0.05829145139855575, rel=1e-12)
