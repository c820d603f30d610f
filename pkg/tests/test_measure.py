"""Biased product measure, coordinate operators, and their exact identities.

The expectation oracle recomputes everything point by point in plain Python
from p**w * (1-p)**(n-w); operator tests check definitions on explicitly
flipped points before trusting any identity built on top of them.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biascube.booleans import dictator, majority, or_all, parity, with_coordinate
from biascube.measure import (
    Bias,
    CubeFunction,
    bias_value,
    center_projection_sides,
    coordinate_average,
    coordinate_center,
    coordinate_center_case_form,
    coordinate_gradient,
    dirichlet_energy,
    energy_derivative_sides,
    entropy,
    expectation,
    expectation_derivative,
    generator_apply,
    influence,
    influences,
    moment_identity,
    point_weight,
    random_cube_function,
    variance,
    weights,
)

BIASES = (0.1, 0.25, 0.5, 0.75, 0.9)


def slow_expectation(values, n, p):
    total = 0.0
    for x in range(1 << n):
        w = bin(x).count("1")
        total += values[x] * p**w * (1 - p) ** (n - w)
    return total


def random_g(n, seed):
    rng = np.random.default_rng(seed)
    return CubeFunction(n, rng.normal(size=1 << n))


class TestWeights:
    @pytest.mark.parametrize("p", BIASES)
    def test_sum_to_one(self, p):
        for n in (1, 4, 7):
            assert math.isclose(float(weights(n, p).sum()), 1.0, abs_tol=1e-14)

    def test_pointwise_closed_form(self):
        n, p = 5, 0.3
        w = weights(n, p)
        for x in (0, 7, 21, 31):
            k = bin(x).count("1")
            assert math.isclose(w[x], p**k * (1 - p) ** (n - k), rel_tol=1e-14)
            assert math.isclose(point_weight(n, p, x), w[x], rel_tol=1e-15)

    def test_bias_validation(self):
        for bad in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                Bias(bad)
        assert bias_value(Bias(0.3)) == 0.3
        assert bias_value(0.3) == 0.3


class TestExpectation:
    @pytest.mark.parametrize("p", BIASES)
    def test_against_slow_oracle(self, p):
        g = random_g(6, seed=11)
        assert math.isclose(
            expectation(g, p), slow_expectation(g.values, 6, p), abs_tol=1e-12
        )

    def test_variance_definition(self):
        g, p = random_g(5, seed=3), 0.4
        mean = expectation(g, p)
        second = expectation(CubeFunction(5, g.values**2), p)
        assert math.isclose(variance(g, p), second - mean**2, abs_tol=1e-12)

    def test_or_closed_form(self):
        for n in (2, 5, 9):
            for p in BIASES:
                assert math.isclose(
                    expectation(or_all(n), p), 1 - (1 - p) ** n, rel_tol=1e-12
                )


class TestOperators:
    def test_gradient_is_flip_difference(self):
        g = random_g(4, seed=5)
        for i in (1, 3):
            grad = coordinate_gradient(g, i)
            for x in range(16):
                hi = g.values[with_coordinate(x, i, 1)]
                lo = g.values[with_coordinate(x, i, 0)]
                assert math.isclose(grad.values[x], hi - lo, abs_tol=1e-14)

    def test_center_is_g_minus_average(self):
        g, p, i = random_g(4, seed=8), 0.3, 2
        avg = coordinate_average(g, p, i)
        cen = coordinate_center(g, p, i)
        assert np.allclose(cen.values, g.values - avg.values, atol=1e-14)
        # the average must not depend on coordinate i
        for x in range(16):
            assert math.isclose(
                avg.values[with_coordinate(x, i, 0)],
                avg.values[with_coordinate(x, i, 1)],
                abs_tol=1e-14,
            )

    def test_center_case_form_agrees(self):
        g, p, i = random_g(5, seed=2), 0.7, 4
        a = coordinate_center(g, p, i)
        b = coordinate_center_case_form(g, p, i)
        assert np.allclose(a.values, b.values, atol=1e-12)

    @given(st.integers(2, 6), st.integers(0, 10_000), st.sampled_from(BIASES))
    @settings(max_examples=40, deadline=None)
    def test_center_idempotent(self, n, seed, p):
        g = random_g(n, seed)
        i = seed % n + 1
        once = coordinate_center(g, p, i)
        twice = coordinate_center(once, p, i)
        assert np.allclose(once.values, twice.values, atol=1e-12)

    @given(st.integers(2, 6), st.integers(0, 10_000), st.sampled_from(BIASES))
    @settings(max_examples=40, deadline=None)
    def test_center_self_adjoint(self, n, seed, p):
        f = random_g(n, seed)
        g = random_g(n, seed + 1)
        i = seed % n + 1
        lhs, rhs = center_projection_sides(f, g, p, i)
        assert math.isclose(lhs, rhs, abs_tol=1e-12)

    def test_generator_sums_centerings(self):
        g, p = random_g(5, seed=9), 0.25
        total = np.zeros_like(g.values)
        for i in range(1, 6):
            total -= coordinate_center(g, p, i).values
        assert np.allclose(generator_apply(g, p).values, total, atol=1e-12)

    def test_energy_two_definitions(self):
        g, p = random_g(5, seed=13), 0.6
        w = weights(5, p)
        by_centerings = sum(
            float(w @ coordinate_center(g, p, i).values ** 2) for i in range(1, 6)
        )
        against_generator = -float(w @ (g.values * generator_apply(g, p).values))
        e = dirichlet_energy(g, p)
        assert math.isclose(e, by_centerings, abs_tol=1e-12)
        assert math.isclose(e, against_generator, abs_tol=1e-12)


class TestMomentIdentity:
    @given(
        st.integers(2, 6),
        st.integers(0, 10_000),
        st.sampled_from(BIASES),
        st.sampled_from((1.0, 2.0, 0.7, 3.5)),
    )
    @settings(max_examples=60, deadline=None)
    def test_holds_for_any_real_function(self, n, seed, p, alpha):
        g = random_g(n, seed)
        i = seed % n + 1
        lhs, rhs = moment_identity(g, p, i, alpha)
        assert math.isclose(lhs, rhs, abs_tol=1e-12)

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            moment_identity(random_g(3, 0), 0.5, 1, 0.0)


class TestInfluence:
    def test_dictator(self):
        # the deciding coordinate's fiber weights sum to 1 only up to
        # float addition order
        f = dictator(4, 2)
        assert influences(f, 0.3) == pytest.approx([0.0, 1.0, 0.0, 0.0], abs=1e-14)

    @pytest.mark.parametrize("p", BIASES)
    def test_or_closed_form(self, p):
        n = 6
        expected = (1 - p) ** (n - 1)
        for i in range(1, n + 1):
            assert math.isclose(influence(or_all(n), p, i), expected, rel_tol=1e-12)

    def test_majority3(self):
        p = 0.3
        assert math.isclose(influence(majority(3), p, 1), 2 * p * (1 - p), rel_tol=1e-12)

    def test_parity_always_pivotal(self):
        assert np.allclose(influences(parity(5), 0.2), 1.0)

    def test_batch_matches_single(self):
        f, p = majority(5), 0.4
        batch = influences(f, p)
        for i in range(1, 6):
            assert math.isclose(batch[i - 1], influence(f, p, i), abs_tol=1e-14)


class TestDerivative:
    def test_or_closed_form(self):
        for n in (2, 8, 16):
            for p in BIASES:
                assert math.isclose(
                    expectation_derivative(or_all(n), p),
                    n * (1 - p) ** (n - 1),
                    rel_tol=1e-9,
                )

    @pytest.mark.parametrize("p", (0.2, 0.5, 0.8))
    def test_finite_difference_any_function(self, p):
        # the gradient-sum formula needs no monotonicity
        g = random_g(6, seed=21)
        h = 1e-6
        fd = (expectation(g, p + h) - expectation(g, p - h)) / (2 * h)
        assert math.isclose(expectation_derivative(g, p), fd, rel_tol=1e-6, abs_tol=1e-8)

    def test_energy_derivative_sides_agree(self):
        for seed, p in ((1, 0.3), (2, 0.5), (3, 0.85)):
            f = or_all(5) if seed == 1 else majority(5)
            lhs, rhs = energy_derivative_sides(f, p)
            assert math.isclose(lhs, rhs, abs_tol=1e-12)


class TestEntropy:
    def test_zero_for_constant(self):
        g = CubeFunction(3, np.full(8, 2.5))
        assert entropy(g, 0.3) == pytest.approx(0.0, abs=1e-14)

    def test_zero_values_use_zero_log_zero(self):
        f = or_all(3)  # indicator takes the value 0
        p = 0.4
        mu = expectation(f, p)
        expected = -mu * math.log(mu)  # sum f log f vanishes on {0,1}
        assert math.isclose(entropy(f, p), expected, rel_tol=1e-12)

    def test_degree_one_homogeneous(self):
        g = CubeFunction(4, np.abs(random_g(4, seed=17).values) + 0.1)
        for c in (0.5, 3.0):
            scaled = CubeFunction(4, c * g.values)
            assert math.isclose(entropy(scaled, 0.3), c * entropy(g, 0.3), rel_tol=1e-11)

    def test_rejects_negative(self):
        g = CubeFunction(2, np.array([1.0, -0.5, 0.2, 0.3]))
        with pytest.raises(ValueError):
            entropy(g, 0.5)


def test_random_cube_function_positive_flag():
    rng = np.random.default_rng(0)
    g = random_cube_function(4, rng, positive=True)
    assert (g.values > 0).all()
