# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

import math
from fractions import Fraction

import pytest

from laguerre_calculus.evolution import (
    InitialData,
    SingularPointError,
    StabilizationDomainError,
    circle_max,
    evolve,
    evolve_two_step,
    pde_residual,
    radial_identity_check,
    stabilization_limit,
    stabilization_profile,
)
from laguerre_calculus.operators import exp_delta_closed
from laguerre_calculus.series import Poly
from laguerre_calculus.zeros import classify_P_plus
from tests.unit.fixtures import CalculusUnitTestFixtures

TIMES = (0.0, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0)


class TestEvolve(CalculusUnitTestFixtures):
    def test_given_no_exponential_factor_when_evolved_then_closed_exponential(self):
        h = Poly((1, 2, 3))

        frame = evolve(InitialData(epsilon=0, h=h), 2, Fraction(1, 2))

        assert frame.prefactor == 1
        assert frame.exp_coefficient == 0
        assert frame.inner == exp_delta_closed(Fraction(1, 2), 2, h)

    def test_given_exponential_factor_when_evolved_then_factored_frame(self):
        frame = evolve(InitialData(epsilon=1, h=Poly.constant(1)), 1, 1)

        assert frame.prefactor == Fraction(1, 2)
        assert frame.exp_coefficient == Fraction(-1, 2)
        assert frame.inner == Poly.constant(1)

    def test_given_zero_time_when_evolved_then_initial_value(self):
        data = InitialData(epsilon=0.5, h=Poly((1.0, -1.0, 0.5)))

        frame = evolve(data, 1.5, 0.0)

        assert frame.evaluate(0.8) == pytest.approx(data.evaluate(0.8))

    def test_given_negative_time_when_evolved_then_value_error(self):
        with pytest.raises(ValueError):
            evolve(InitialData(epsilon=1, h=Poly.constant(1)), 1, -1)

    def test_given_negative_epsilon_when_initial_data_created_then_value_error(self):
        with pytest.raises(ValueError):
            InitialData(epsilon=-1, h=Poly.constant(1))

    @pytest.mark.parametrize("theta", [0, 1, 2.5])
    def test_given_two_steps_when_evolved_then_same_as_single_step(self, theta):
        data = InitialData(epsilon=0.75, h=Poly((1.0, 1.0, 0.25)))

        split = evolve_two_step(data, theta, 0.4, 0.9)
        direct = evolve(data, theta, 1.3)

        for z in (0.0, 0.5, -1.2, 0.3 + 0.7j):
            assert abs(split.evaluate(z) - direct.evaluate(z)) <= 1e-12 * max(
                1.0, abs(direct.evaluate(z))
            )

    def test_given_exact_data_when_evolved_in_two_steps_then_identical_frames(self):
        data = InitialData(epsilon=1, h=Poly((1, 1)))

        split = evolve_two_step(data, 2, Fraction(1, 3), Fraction(2, 3))
        direct = evolve(data, 2, 1)

        assert split.prefactor == direct.prefactor
        assert split.exp_coefficient == direct.exp_coefficient
        assert split.inner == direct.inner

    @pytest.mark.parametrize("epsilon", [0, 0.5, 2.0])
    @pytest.mark.parametrize("t", [0.25, 1.0, 3.0])
    def test_given_p_plus_data_when_evolved_then_inner_stays_in_p_plus(self, epsilon, t):
        h = Poly.from_roots([-0.5, -1.0, -3.0])

        frame = evolve(InitialData(epsilon=epsilon, h=h), 1.5, t)

        if epsilon:
            assert frame.exp_coefficient < 0
        else:
            assert frame.exp_coefficient == 0
        assert classify_P_plus(frame.inner)


class TestPdeResidual(CalculusUnitTestFixtures):
    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("t", [0.1, 1.0, 2.0])
    @pytest.mark.parametrize("z", [-1.5, 0.0, 0.75, 1.5])
    def test_given_solution_when_residual_evaluated_then_small(self, theta, t, z):
        data = InitialData(epsilon=1.0, h=Poly((1.0, 0.0, 1.0)))

        assert pde_residual(data, theta, t, z, dt=5e-6) <= 1e-8

    def test_given_decaying_exponential_when_residual_evaluated_then_below_tolerance(self):
        data = InitialData(epsilon=1.0, h=Poly.constant(1.0))

        assert pde_residual(data, 1.0, 1.0, 0.5, dt=1e-4) <= 1e-8

    @pytest.mark.parametrize("theta", [0, 1.5])
    def test_given_linear_data_when_residual_evaluated_then_round_off_only(self, theta):
        data = InitialData(epsilon=0, h=Poly((0.0, 1.0)))

        assert pde_residual(data, theta, 1.0, 0.7) <= 1e-10

    def test_given_fourth_order_stencil_when_residual_evaluated_then_finer(self):
        data = InitialData(epsilon=0.5, h=Poly((1.0, 1.0)))

        assert pde_residual(data, 1.0, 1.0, 0.5, stencil=4) <= 1e-10

    def test_given_default_step_when_residual_evaluated_then_second_order_difference(self):
        data = InitialData(epsilon=1.0, h=Poly.constant(1.0))
        step = 1e-3

        def value(time: float) -> complex:
            return evolve(data, 1.0, time).evaluate(0.5)

        expected = abs(
            (value(1.0 + step) - value(1.0 - step)) / (2 * step)
            - evolve(data, 1.0, 1.0).delta(1.0, 0.5)
        )

        assert pde_residual(data, 1.0, 1.0, 0.5) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize(
        "t,kwargs",
        [(0.0, {}), (1.0, {"stencil": 3}), (0.1, {"dt": 0.2}), (0.1, {"dt": 0.06, "stencil": 4})],
    )
    def test_given_invalid_arguments_when_residual_evaluated_then_value_error(self, t, kwargs):
        data = InitialData(epsilon=1.0, h=Poly.constant(1.0))

        with pytest.raises(ValueError):
            pde_residual(data, 1.0, t, 0.5, **kwargs)


class TestStabilization(CalculusUnitTestFixtures):
    def test_given_decaying_exponential_when_profile_then_decays_monotonically(self):
        data = InitialData(epsilon=1.0, h=Poly.constant(1.0))

        profile = stabilization_profile(data, 1.0, TIMES)

        values = [value for _, value in profile.rows]
        assert values[0] == pytest.approx(math.e, rel=1e-9)
        assert values[-1] <= 1.1e-3
        assert profile.monotone_from == 0
        assert all(left > right for left, right in zip(values, values[1:]))

    def test_given_profile_when_rendered_then_csv_rows(self):
        data = InitialData(epsilon=1.0, h=Poly.constant(1.0))

        lines = stabilization_profile(data, 1.0, (0.0, 1.0)).to_csv().splitlines()

        assert lines[0] == "t,sup_norm"
        assert len(lines) == 3
        assert float(lines[2].split(",")[0]) == 1.0

    def test_given_known_frame_when_circle_max_then_closed_value(self):
        frame = evolve(InitialData(epsilon=1.0, h=Poly.constant(1.0)), 1.0, 1.0)

        assert circle_max(frame, 2.0) == pytest.approx(0.5 * math.e, rel=1e-9)
        assert circle_max(frame, 0.0) == pytest.approx(0.5)

    def test_given_zero_epsilon_when_profile_then_stabilization_domain_error(self):
        with pytest.raises(StabilizationDomainError):
            stabilization_profile(InitialData(epsilon=0, h=Poly.constant(1)), 1.0, TIMES)

    def test_given_theta_zero_when_profile_then_stabilization_domain_error(self):
        with pytest.raises(StabilizationDomainError):
            stabilization_profile(InitialData(epsilon=1, h=Poly.constant(1)), 0, TIMES)

    def test_given_linear_h_when_limit_then_exponential_at_origin(self):
        data = InitialData(epsilon=2, h=Poly((0, 1)))

        assert stabilization_limit(data, 1) == Fraction(1, 2)

    def test_given_zero_epsilon_when_limit_then_stabilization_domain_error(self):
        with pytest.raises(StabilizationDomainError):
            stabilization_limit(InitialData(epsilon=0, h=Poly.constant(1)), 1)

    def test_given_theta_zero_when_rescaled_solution_then_tends_to_limit(self):
        data = InitialData(epsilon=1.0, h=Poly((1.0, 1.0)))
        limit = complex(stabilization_limit(data, 0))

        frame = evolve(data, 0, 1e6)

        assert abs(frame.evaluate(0.5) - limit) <= 1e-5 * max(1.0, abs(limit))


class TestRadialIdentity(CalculusUnitTestFixtures):
    @pytest.mark.parametrize("theta", [0, 0.5, 2.5])
    @pytest.mark.parametrize("z", [0.7, -1.3, 0.4 + 0.9j])
    def test_given_poly_when_radial_identity_checked_then_sides_agree(self, theta, z):
        f = Poly((1.0, 2.0, -3.0, 0.5))

        assert radial_identity_check(f, theta, z) <= 1e-12

    def test_given_origin_when_radial_identity_checked_then_singular_point_error(self):
        with pytest.raises(SingularPointError):
            radial_identity_check(Poly((1, 1)), 1, 0)
