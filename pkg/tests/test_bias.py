import math

import numpy as np
import pytest

from analytics.bias import A_EXPONENT, biased_tuple, choose_A, delta2_quadrature
from model.events import OrderingEvent
from model.sampler import ZModel, mc_event_probability
from utils.errors import DomainError


@pytest.mark.parametrize("n", [3, 10, 100])
def test_delta2_uncorrelated_is_falling_factorial(n):
    assert delta2_quadrature(0.0, n) * n * (n - 1) == pytest.approx(1.0, abs=1e-4)


def test_delta2_negative_correlation_lowers_the_density():
    assert delta2_quadrature(-0.1, 200) < 1 / (200 * 199)


def test_delta2_positive_correlation_raises_the_density():
    assert delta2_quadrature(0.1, 20) > 1 / 380


def test_delta2_methods_agree():
    reduced = delta2_quadrature(0.2, 6, method="reduced")
    double = delta2_quadrature(0.2, 6, method="dblquad")
    assert double == pytest.approx(reduced, abs=1e-6)


@pytest.mark.parametrize("r12,n", [(1.0, 5), (-1.0, 5), (0.0, 2)])
def test_delta2_domain(r12, n):
    with pytest.raises(DomainError):
        delta2_quadrature(r12, n)


def test_delta2_unknown_method():
    with pytest.raises(DomainError):
        delta2_quadrature(0.0, 5, method="simpson")


@pytest.mark.parametrize("q,k,n,expected", [
    (35, 3, 3, (1, 34, 6)),
    (7, 2, 2, (1, 6)),
    (11, 4, 4, (1, 10, 7, 9)),
    (7, 2, 4, (1, 6, 2, 3)),
])
def test_biased_tuple(q, k, n, expected):
    assert biased_tuple(q, k, n) == expected


def test_biased_tuple_uses_primes_coprime_to_q():
    # q = 15: p1 = 2, p2 = 7, so a_3 = 14^3 = 14 mod 15 collides with -1
    with pytest.raises(DomainError, match="collides"):
        biased_tuple(15, 3, 3)


def test_biased_tuple_collision_named():
    # q = 5: 6 = 1 mod 5, so a_3 = 1 = a_1
    with pytest.raises(DomainError, match="a_1 = a_3"):
        biased_tuple(5, 3, 3)


def test_biased_tuple_ranges():
    with pytest.raises(DomainError):
        biased_tuple(7, 1, 3)
    with pytest.raises(DomainError):
        biased_tuple(7, 3, 7)


def test_choose_a_example():
    assert choose_A(10 ** 6, 2) == pytest.approx(4.5366, abs=1e-4)


@pytest.mark.parametrize("n,k", [(10 ** 6, 2), (500, 3), (10 ** 9, 50), (100, 1)])
def test_choose_a_defining_identity(n, k):
    a = choose_A(n, k)
    assert math.exp(A_EXPONENT * a * a) * k * math.log(n) / n == pytest.approx(1.0, rel=1e-12)


def test_choose_a_undefined_regime():
    with pytest.raises(DomainError, match="A undefined in this regime"):
        choose_A(3, 3)


@pytest.mark.slow
@pytest.mark.parametrize("r12", [0.1, -0.1])
def test_delta2_matches_sampling(r12):
    n = 20
    r = np.eye(n)
    r[0, 1] = r[1, 0] = r12
    est = mc_event_probability(ZModel(r), OrderingEvent.first_k(2, n), 10**8, seed=31, workers=8)
    exact = delta2_quadrature(r12, n)
    assert abs(est.value - exact) < 4 * est.stderr
    # the sampled density sits on the same side of 1/(n(n-1)) as the quadrature
    assert (est.value - 1 / 380) * (exact - 1 / 380) > 0
