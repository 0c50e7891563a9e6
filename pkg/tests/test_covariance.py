import math

import mpmath
import numpy as np
import pytest
from sympy import factorint

from arithmetic.characters import character_group
from model.covariance import (CorrelationMatrix, bq, correlation_average_report,
                              correlation_matrix, cq_shift, lambda_term, large_cov_ratio, m1_sum,
                              m2_sum, shift_vector, var_q)
from utils.arith import mod_inverse, units
from utils.errors import CostGuardError, DomainError, NonUnitResidueError
from zeros.synthesis import synthesize_zeros
from zeros.zero_set import make_zero_set


# C_q(a)

@pytest.mark.parametrize("q,a,expected", [(8, 1, 3), (8, 3, -1), (5, 4, 1), (5, 2, -1), (7, 2, 1)])
def test_cq_shift_examples(q, a, expected):
    assert cq_shift(q, a) == expected


@pytest.mark.parametrize("q", [3, 4, 8, 9, 15, 16, 24, 45, 63, 100])
def test_cq_shift_matches_enumeration(q):
    for a in units(q):
        roots = sum(1 for b in range(q) if b * b % q == a)
        assert cq_shift(q, a) == roots - 1


def test_cq_shift_rejects_non_units():
    with pytest.raises(NonUnitResidueError):
        cq_shift(8, 2)


def test_shift_vector():
    sv = shift_vector(8, [1, 3])
    assert sv.c == (3, -1)
    assert sv.as_array().tolist() == [3.0, -1.0]


# Var(q)

def test_var_q_single_term(unit_weight_zeros):
    assert var_q(unit_weight_zeros) == pytest.approx(2.0)


def test_var_q_is_additive():
    g = 3 ** 0.5 / 2
    zs = make_zero_set(5, [(2, [g]), (4, [g])])
    assert var_q(zs) == pytest.approx(4.0)


def test_var_q_matches_extended_precision():
    zs = synthesize_zeros(5, character_group(5), 1000, seed=3)
    mpmath.mp.dps = 40
    oracle = 2 * mpmath.fsum(1 / (mpmath.mpf(1) / 4 + mpmath.mpf(float(g)) ** 2)
                             for b in zs.blocks for g in b.gammas)
    assert var_q(zs) == pytest.approx(float(oracle), rel=1e-10)


def test_var_q_empty_set_rejected():
    with pytest.raises(DomainError):
        var_q(make_zero_set(4, []))


# B_q and r

def test_bq_unit_weight(unit_weight_zeros, table4):
    assert bq(unit_weight_zeros, table4, 1, 3) == pytest.approx(-2.0)


def test_bq_equal_residues_rejected(zeros4, table4):
    with pytest.raises(DomainError):
        bq(zeros4, table4, 1, 5)


def test_q4_correlation_is_exactly_minus_one(zeros4, table4):
    assert bq(zeros4, table4, 1, 3) == pytest.approx(-var_q(zeros4), rel=1e-10)
    cm = correlation_matrix(zeros4, table4, [1, 3])
    assert cm.r.tolist() == [[1.0, -1.0], [-1.0, 1.0]]

    synthetic = synthesize_zeros(4, table4, 200, seed=9)
    assert correlation_matrix(synthetic, table4, [1, 3]).r[0, 1] == -1.0


def test_single_residue(zeros5, table5):
    cm = correlation_matrix(zeros5, table5, [2])
    assert cm.r.tolist() == [[1.0]]


def test_duplicates_rejected(zeros5, table5):
    with pytest.raises(DomainError, match="duplicate"):
        correlation_matrix(zeros5, table5, [1, 6])


def test_q5_matrix_is_a_psd_correlation(zeros5, table5):
    cm = correlation_matrix(zeros5, table5, [1, 2, 3, 4])
    assert np.array_equal(np.diag(cm.r), np.ones(4))
    assert np.array_equal(cm.r, cm.r.T)
    assert cm.min_eigenvalue >= -1e-8
    assert np.all(np.abs(cm.off_diagonal()) <= 1.0)
    assert not cm.partial
    assert cm.truncation_count == 4 * 50


@pytest.mark.parametrize("seed", range(20))
def test_random_configurations_are_psd(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.choice([5, 7, 8, 9, 11, 12, 13, 15, 16, 21]))
    group = units(q)
    n = int(rng.integers(2, len(group) + 1))
    residues = [int(a) for a in rng.choice(group, size=n, replace=False)]
    zs = synthesize_zeros(q, character_group(q), 30, seed=seed)
    cm = correlation_matrix(zs, character_group(q), residues)
    assert cm.min_eigenvalue >= -1e-8


def test_workers_do_not_change_entries(zeros5, table5):
    one = correlation_matrix(zeros5, table5, [1, 2, 3, 4])
    many = correlation_matrix(zeros5, table5, [1, 2, 3, 4], workers=4)
    assert np.array_equal(one.r, many.r)


def test_partial_coverage_is_flagged(table5):
    zs = make_zero_set(5, [(2, [14.1, 20.0])])
    cm = correlation_matrix(zs, table5, [1, 4])
    assert cm.partial
    # chi_2(4) = -1, so a lone block still gives r(1, 4) = -1
    assert cm.r[0, 1] == pytest.approx(-1.0)


def test_large_cov_ratio():
    assert large_cov_ratio(5, -math.log(2) * 4) == pytest.approx(1.0)


# Lambda term, M1, M2

@pytest.mark.parametrize("a,b,expected", [(1, 5, math.log(3) / 2), (1, 7, math.log(2)), (1, 11, 0.0)])
def test_lambda_term(a, b, expected):
    assert lambda_term(12, a, b) == pytest.approx(expected, abs=1e-15)


def test_lambda_term_needs_distinct_classes():
    with pytest.raises(DomainError):
        lambda_term(12, 1, 13)


def _mangoldt_mp(n):
    f = factorint(n)
    if len(f) != 1:
        return mpmath.mpf(0)
    return mpmath.log(list(f)[0])


def _m1_oracle(q, a, d):
    mpmath.mp.dps = 30
    x = (q * math.log(q)) ** 2
    limit = int(math.floor(2 * x * math.log(x)))
    n0 = d * mod_inverse(a, q) % q
    return float(mpmath.fsum(_mangoldt_mp(n) * mpmath.exp(-mpmath.mpf(n) / x) / n
                             for n in range(n0 or q, limit + 1, q) if n > 1))


@pytest.mark.parametrize("q,a,d", [(3, 1, 2), (3, 2, 2), (5, 2, 3), (12, 5, 7), (7, 3, 1)])
def test_m1_matches_oracle(q, a, d):
    assert m1_sum(q, a, d) == pytest.approx(_m1_oracle(q, a, d), rel=1e-10)


def test_m1_starts_at_four_when_class_of_one():
    x = (3 * math.log(3)) ** 2
    assert m1_sum(3, 2, 2) > math.log(2) * math.exp(-4 / x) / 4


def _m2_oracle(q, a, d):
    x = (q * math.log(q)) ** 2
    e_max = int(math.floor(2 * math.log(x)))
    terms = []
    for p, v in factorint(q).items():
        m = q // p ** v
        for e in range(1, e_max + 1):
            if m == 1 or (a * p ** e - d) % m == 0:
                terms.append(mpmath.log(p) / (mpmath.mpf(p) ** (e + v - 1) * (p - 1)))
    return float(mpmath.fsum(terms))


@pytest.mark.parametrize("q,a,d", [(7, 1, 3), (15, 2, 4), (30, 7, 1), (45, 1, 1), (49, 3, 5)])
def test_m2_matches_oracle(q, a, d):
    assert m2_sum(q, a, d) == pytest.approx(_m2_oracle(q, a, d), rel=1e-12)


def test_m2_prime_modulus_single_factor():
    q = 11
    x = (q * math.log(q)) ** 2
    e_max = int(math.floor(2 * math.log(x)))
    expected = math.fsum(math.log(q) / (q ** e * (q - 1)) for e in range(1, e_max + 1))
    assert m2_sum(q, 2, 5) == pytest.approx(expected, rel=1e-12)


def test_mangoldt_sums_guarded(monkeypatch):
    monkeypatch.delenv("RACE_GUARD_OVERRIDE", raising=False)
    with pytest.raises(CostGuardError):
        m1_sum(10007, 1, 2)


# Correlation average

def test_correlation_average_vanishes_for_identity():
    cm = CorrelationMatrix(0, (1, 2, 3, 4), 1.0, np.eye(4))
    report = correlation_average_report(cm, [0, 1], [2, 3], log_q=10.0)
    assert report.sum == 0.0 and report.ratio == 0.0


def test_correlation_average_single_pair():
    cm = CorrelationMatrix(0, (1, 2), 1.0, np.array([[1.0, 0.01], [0.01, 1.0]]))
    report = correlation_average_report(cm, [0], [1], log_q=100.0)
    assert report.paper_form == pytest.approx(math.log(2) ** 2 / 100, rel=1e-12)
    assert report.ratio == pytest.approx(2.0814, rel=1e-4)


def test_correlation_average_needs_log_q_without_modulus():
    cm = CorrelationMatrix(0, (1, 2), 1.0, np.eye(2))
    with pytest.raises(DomainError):
        correlation_average_report(cm, [0], [1])


def test_correlation_average_skips_equal_classes(zeros5, table5):
    cm = correlation_matrix(zeros5, table5, [1, 2, 3, 4])
    full = correlation_average_report(cm, [0, 1, 2, 3], [0, 1, 2, 3])
    expected = float(np.abs(cm.off_diagonal()).sum())
    assert full.sum == pytest.approx(expected, rel=1e-12)
