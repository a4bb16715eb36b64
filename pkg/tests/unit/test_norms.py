# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from laguerre_calculus.norms import (
    NormDomainError,
    SequenceHypothesisError,
    SequenceParams,
    laguerre_stream,
    mu_k,
    norm_b,
    norm_N_laguerre,
    norm_N_sampled,
    operator_bound_check,
    sandwich_constant,
    sequence_bound,
)
from laguerre_calculus.operators import CompositionDomainError, OperatorSpec
from laguerre_calculus.series import LaguerreForm, Poly, TaylorStream
from tests.unit.fixtures import CalculusUnitTestFixtures
from tests.unit.polynomial_helpers import exact_polys


class TestNormB(CalculusUnitTestFixtures):
    def test_given_linear_poly_when_norm_b_then_weighted_sup(self):
        report = norm_b(Poly((0, 1)), 2)

        assert report.value == 0.5
        assert report.tail_bound == 0.0

    @pytest.mark.parametrize("n", range(31))
    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    def test_given_normalized_monomial_when_norm_b_then_exact_power(self, n, a):
        f = Poly.monomial(n, Fraction(1, math.factorial(n)))

        assert norm_b(f, a).value == a ** (-n)

    @pytest.mark.parametrize("b", [0, -1.0])
    def test_given_nonpositive_b_when_norm_b_then_norm_domain_error(self, b):
        with pytest.raises(NormDomainError):
            norm_b(Poly((1,)), b)

    def test_given_exponential_stream_when_norm_b_then_value_and_tail_certificate(self):
        stream = TaylorStream.from_form(LaguerreForm(alpha=1), type_bound=1.0, norm_bound=1.0)

        report = norm_b(stream, 2.0)

        assert report.value == 1.0
        assert report.tail_bound <= 1e-12
        assert report.tail_bound == pytest.approx(0.5 ** (report.truncation_degree + 1))

    def test_given_stream_wider_than_b_when_norm_b_then_infinite_tail(self):
        stream = TaylorStream.from_form(LaguerreForm(alpha=1), type_bound=2.0, norm_bound=1.0)

        report = norm_b(stream, 1.0, degree=20)

        assert math.isinf(report.tail_bound)

    @given(
        exact_polys(max_degree=10),
        st.floats(min_value=0.1, max_value=5.0),
        st.floats(min_value=0.0, max_value=5.0),
    )
    def test_given_larger_b_when_norm_b_then_not_larger(self, f, b, step):
        assert norm_b(f, b + step).value <= norm_b(f, b).value * (1 + 1e-12)


class TestSequenceBound(CalculusUnitTestFixtures):
    def test_given_betas_when_power_sum_then_exact(self):
        form = LaguerreForm(betas=(Fraction(1, 2), 2))

        assert mu_k(form, 1) == Fraction(5, 2)
        assert mu_k(form, 2) == Fraction(17, 4)

    def test_given_single_form_when_sequence_bound_then_peak_over_integers(self):
        params = SequenceParams((LaguerreForm(C=1, l=2, alpha=0.5, betas=(0.25,)),))

        assert sequence_bound(params, 0.75, 1.0, 2, 1.5) == pytest.approx(2.0)

    def test_given_l_zero_when_sequence_bound_then_constant(self):
        params = SequenceParams((LaguerreForm(C=1, l=0, alpha=0.5),))

        assert sequence_bound(params, 0.5, 3.0, 0, 1.0) == 3.0

    def test_given_zero_constant_when_sequence_bound_then_zero(self):
        params = SequenceParams((LaguerreForm(C=0, l=1, betas=(0.5,)),))

        assert sequence_bound(params, 1.0, 0.0, 1, 2.0) == 0.0

    def test_given_members_when_sequence_bound_then_bounds_every_member_norm(self):
        forms = tuple(
            LaguerreForm(C=1, l=1, alpha=0.25, betas=(0.5 / (n + 1),)) for n in range(5)
        )
        bound = sequence_bound(SequenceParams(forms), 0.75, 1.0, 1, 2.0)

        for form in forms:
            stream = laguerre_stream(form, 1.0)
            report = norm_b(stream, 2.0)
            assert report.value <= bound * (1 + 1e-12)

    @pytest.mark.parametrize(
        "form,a,C,l,b",
        [
            (LaguerreForm(C=2, l=0, alpha=0.1), 1.0, 1.0, 0, 2.0),
            (LaguerreForm(C=1, l=3, alpha=0.1), 1.0, 1.0, 2, 2.0),
            (LaguerreForm(C=1, l=0, alpha=0.5, betas=(1,)), 1.0, 1.0, 0, 2.0),
            (LaguerreForm(C=1, l=0, alpha=0.1), 1.0, 1.0, 0, 1.0),
        ],
    )
    def test_given_violated_hypothesis_when_sequence_bound_then_error(
        self, form, a, C, l, b  # noqa: E741, N803
    ):
        with pytest.raises(SequenceHypothesisError):
            sequence_bound(SequenceParams((form,)), a, C, l, b)


class TestNormN(CalculusUnitTestFixtures):
    def test_given_linear_factor_when_norm_n_then_interior_maximum(self):
        form = LaguerreForm(C=1, l=0, alpha=0, betas=(1,))

        assert norm_N_laguerre(form, 0.5) == pytest.approx(2 * math.exp(-0.5), rel=1e-10)

    def test_given_linear_factor_and_large_c_when_norm_n_then_value_at_origin(self):
        form = LaguerreForm(C=3, l=0, alpha=0, betas=(1,))

        assert norm_N_laguerre(form, 1.0) == 3.0

    @pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
    def test_given_power_of_z_when_norm_n_then_closed_value(self, c):
        form = LaguerreForm(C=1, l=1, alpha=0)

        assert norm_N_laguerre(form, c) == pytest.approx(1 / (c * math.e), rel=1e-10)

    def test_given_form_when_norm_n_then_agrees_with_sampling(self):
        form = LaguerreForm(C=1.5, l=2, alpha=0.25, betas=(0.5, 0.1))

        exact = norm_N_laguerre(form, 1.5)
        sampled = norm_N_sampled(form, 1.5, radius=40.0, samples=200_000)

        assert sampled <= exact * (1 + 1e-12)
        assert sampled == pytest.approx(exact, rel=1e-6)

    def test_given_c_not_above_alpha_when_norm_n_then_norm_domain_error(self):
        with pytest.raises(NormDomainError):
            norm_N_laguerre(LaguerreForm(alpha=1.0), 1.0)

    @pytest.mark.parametrize(
        "form", [LaguerreForm(C=-1), LaguerreForm(C=1, alpha=-0.5), LaguerreForm(C=1j)]
    )
    def test_given_unsupported_form_when_norm_n_then_norm_domain_error(self, form):
        with pytest.raises(NormDomainError):
            norm_N_laguerre(form, 2.0)


class TestSandwich(CalculusUnitTestFixtures):
    def test_given_b_and_eps_when_sandwich_constant_then_matches_brute_force_sup(self):
        b, eps = 2.0, 0.5
        brute = max(
            math.exp(
                math.lgamma(k + 1) - k * math.log(k) + k * math.log(1 - eps / b) + k
            )
            for k in range(1, 2000)
        )

        assert sandwich_constant(b, eps) == pytest.approx(max(1.0, brute), rel=1e-12)

    @pytest.mark.parametrize("b,eps", [(1.0, 0.0), (1.0, 1.0), (1.0, 2.0)])
    def test_given_eps_outside_range_when_sandwich_constant_then_norm_domain_error(self, b, eps):
        with pytest.raises(NormDomainError):
            sandwich_constant(b, eps)

    @pytest.mark.parametrize(
        "form",
        [
            LaguerreForm(C=1, l=1, alpha=0.5, betas=(0.5,)),
            LaguerreForm(C=2, l=0, alpha=0.0, betas=(1.0, 0.25)),
            LaguerreForm(C=0.5, l=2, alpha=1.0),
        ],
    )
    def test_given_form_when_norms_compared_then_sandwich_holds(self, form):
        alpha = float(form.alpha)
        b = alpha + 2.0
        eps = 1.0
        stream = laguerre_stream(form, alpha + 1.0)
        report = norm_b(stream, b, degree=60)

        lower = norm_N_laguerre(form, b)
        upper = sandwich_constant(b, eps) * norm_N_laguerre(form, b - eps)

        assert lower <= report.value * (1 + 1e-12)
        assert report.value + report.tail_bound <= upper * (1 + 1e-12)


class TestLaguerreStream(CalculusUnitTestFixtures):
    def test_given_b_not_above_alpha_when_laguerre_stream_then_error(self):
        with pytest.raises(SequenceHypothesisError):
            laguerre_stream(LaguerreForm(alpha=1.0), 1.0)

    @pytest.mark.parametrize(
        "form,b",
        [
            (LaguerreForm(C=1, l=1, alpha=0.5, betas=(0.5,)), 0.75),
            (LaguerreForm(C=1, l=1, alpha=0.5, betas=(0.5,)), 3.0),
            (LaguerreForm(C=2, l=0, alpha=0, betas=(1.0,)), 2.0),
            (LaguerreForm(C=1, l=3), 1.0),
        ],
    )
    def test_given_form_when_stream_built_then_majorant_bounds_norm(self, form, b):
        stream = laguerre_stream(form, b)

        for k in range(60):
            c_k = abs(complex(stream.coefficient(k)))
            assert math.factorial(k) * c_k / b**k <= stream.norm_bound * (1 + 1e-12)


class TestOperatorBound(CalculusUnitTestFixtures):
    def test_given_admissible_inputs_when_bound_checked_then_satisfied(self):
        phi = OperatorSpec.from_poly(Poly((1, 1)), type_bound=0.5)

        report = operator_bound_check(phi, Poly((0, 0, 1)), 0.5, 1.0, 1.0)

        assert report.c == pytest.approx(2.0)
        assert report.satisfied
        assert report.output_norm <= report.bound

    def test_given_random_inputs_when_bound_checked_then_always_satisfied(self):
        for _ in range(50):
            a = float(self.rng.uniform(0.1, 2.0))
            b = float(self.rng.uniform(0.05, 0.99 / a))
            theta = float(self.rng.uniform(0.0, 3.0))
            phi = Poly(tuple(float(c) for c in self.rng.uniform(-1, 1, 4)))
            f = Poly(tuple(float(c) for c in self.rng.uniform(-1, 1, 8)))

            report = operator_bound_check(
                OperatorSpec.from_poly(phi, type_bound=a), f, a, b, theta
            )

            assert report.satisfied

    def test_given_product_at_least_one_when_bound_checked_then_composition_error(self):
        phi = OperatorSpec.from_poly(Poly((1, 1)), type_bound=1.0)

        with pytest.raises(CompositionDomainError):
            operator_bound_check(phi, Poly((1,)), 1.0, 1.0, 1.0)
