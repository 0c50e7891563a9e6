import math

import mpmath
import numpy as np
import pytest

from analytics.normal import (leader_conditional_product, leader_cutoff, leader_probability,
                              log_phi_cdf, ncr2_conditional_integral, phi_cdf, phi_pdf,
                              phi_power_integral, phi_power_integral_quad)
from model.sampler import sample_equicorrelated
from utils.errors import DomainError
from utils.rng import STREAM_CHECKS, stream_generator


def test_phi_basics():
    assert phi_cdf(0.0) == 0.5
    assert phi_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert phi_cdf(np.array([0.0, 0.0])).tolist() == [0.5, 0.5]


def test_log_phi_is_finite_deep_in_the_tail():
    # log Phi(-x) ~ -x^2/2 - log(x sqrt(2 pi))
    x = 40.0
    assert log_phi_cdf(-x) == pytest.approx(-x * x / 2 - math.log(x * math.sqrt(2 * math.pi)), rel=1e-3)


@pytest.mark.parametrize("n", [1, 2, 5, 50])
@pytest.mark.parametrize("a", [-1.0, 0.0, 2.0])
def test_phi_power_closed_form_matches_quadrature(n, a):
    assert phi_power_integral(n, a) == pytest.approx(phi_power_integral_quad(n, a), rel=1e-10)


def test_phi_power_over_the_whole_line():
    assert phi_power_integral(3, -math.inf) == pytest.approx(1 / 3)
    assert phi_power_integral(4, 0.0) == pytest.approx((1 - 0.5 ** 4) / 4)


def test_phi_power_needs_positive_n():
    with pytest.raises(DomainError):
        phi_power_integral(0, 0.0)


def test_ncr2_single_variable_is_phi():
    assert ncr2_conditional_integral(1, 0.3, 0.7) == pytest.approx(phi_cdf(0.7), rel=1e-10)


def test_ncr2_orthant_of_two():
    # P(W1 <= 0, W2 <= 0) with correlation 1/2 is 1/4 + arcsin(1/2)/(2 pi)
    assert ncr2_conditional_integral(2, 0.5, 0.0) == pytest.approx(1 / 3, rel=1e-10)


def test_ncr2_weak_correlation_approaches_independence():
    assert ncr2_conditional_integral(10, 1e-6, 1.5) == pytest.approx(phi_cdf(1.5) ** 10, rel=1e-4)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
def test_ncr2_epsilon_range(eps):
    with pytest.raises(DomainError):
        ncr2_conditional_integral(3, eps, 0.0)


def test_leader_conditional_product():
    assert leader_conditional_product([0.5], 1.0) == pytest.approx(0.7181486, rel=1e-6)
    assert leader_conditional_product([], 1.0) == 1.0


@pytest.mark.parametrize("n", [2, 3, 10])
def test_leader_probability_uncorrelated(n):
    assert leader_probability([0.0] * (n - 1)) == pytest.approx(1 / n, rel=1e-9)


def test_leader_probability_favours_negative_correlation():
    # X_1 leads more often when the others move against it
    assert leader_probability([-0.3, -0.3]) > 1 / 3 > leader_probability([0.3, 0.3])


def test_leader_probability_rejects_perfect_correlation():
    with pytest.raises(DomainError):
        leader_probability([1.0])


def test_leader_cutoff():
    assert leader_cutoff(100) == pytest.approx(math.sqrt(1.999 * math.log(100)))
    with pytest.raises(DomainError):
        leader_cutoff(1)


def test_phi_matches_arbitrary_precision():
    assert phi_cdf(1.0) == pytest.approx(float(mpmath.ncdf(1)), abs=1e-12)
    assert phi_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-12)


@pytest.mark.parametrize("n", [2, 10, 100])
def test_phi_power_over_the_line_is_one_over_n(n):
    assert phi_power_integral(n, -math.inf) == pytest.approx(1 / n, abs=1e-10)
    assert phi_power_integral_quad(n, -math.inf) == pytest.approx(1 / n, abs=1e-10)


def test_ncr2_is_monotone_in_a():
    values = [ncr2_conditional_integral(10, 0.1, a) for a in np.linspace(0.0, 3.0, 13)]
    assert all(lo <= hi for lo, hi in zip(values, values[1:]))


@pytest.mark.parametrize("eps", [0.01, 0.1, 0.3])
@pytest.mark.parametrize("n", [2, 5, 20, 50])
def test_ncr2_dominates_independence(eps, n):
    # positive correlation only helps every coordinate stay below A
    for a in np.linspace(0.0, 3.0, 7):
        assert ncr2_conditional_integral(n, eps, a) >= phi_cdf(a) ** n - 1e-10


@pytest.mark.slow
def test_ncr2_matches_sampling():
    n, eps, a = 20, 0.1, 2.0
    hits = total = 0
    for chunk in range(100):
        w = sample_equicorrelated(n, eps, stream_generator(4, STREAM_CHECKS, chunk), 100000)
        hits += int(np.count_nonzero(w.max(axis=1) <= a))
        total += w.shape[0]
    p = hits / total
    assert abs(p - ncr2_conditional_integral(n, eps, a)) < 4 * math.sqrt(p * (1 - p) / total)
