import math

import numpy as np
import pytest
from sympy import factorint, primerange, totient

from utils.arith import (euler_phi, factorize, is_unit, least_primitive_root, mangoldt_table,
                         mod_inverse, multiplicative_order, prime_sieve, require_unit, units,
                         von_mangoldt)
from utils.errors import DomainError, NonUnitResidueError
from utils.helpers import (compensated_sum, format_number, index_subset, max_abs, parse_float_list,
                           parse_int_list)


@pytest.mark.parametrize("n", [1, 2, 12, 97, 360, 1001, 2 ** 10, 3 ** 4 * 5 ** 2])
def test_factorize_matches_sympy(n):
    assert factorize(n) == {int(p): int(e) for p, e in factorint(n).items()}


def test_factorize_rejects_nonpositive():
    with pytest.raises(DomainError):
        factorize(0)


def test_euler_phi_matches_sympy():
    for n in range(1, 300):
        assert euler_phi(n) == int(totient(n))


def test_von_mangoldt():
    assert von_mangoldt(1) == 0.0
    assert von_mangoldt(8) == pytest.approx(math.log(2))
    assert von_mangoldt(9) == pytest.approx(math.log(3))
    assert von_mangoldt(6) == 0.0
    assert von_mangoldt(13) == pytest.approx(math.log(13))


def test_units_and_inverse():
    assert units(12) == [1, 5, 7, 11]
    assert is_unit(7, 12) and not is_unit(4, 12)
    for a in units(35):
        assert a * mod_inverse(a, 35) % 35 == 1


def test_require_unit_reduces_and_rejects():
    assert require_unit(7, 4) == 3
    with pytest.raises(NonUnitResidueError, match="non-unit residue"):
        require_unit(6, 4)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 29, 40487])
def test_least_primitive_root_generates_mod_p_squared(p):
    g = least_primitive_root(p)
    assert multiplicative_order(g, p * p, p * (p - 1)) == p * (p - 1)


def test_prime_sieve_matches_sympy():
    for limit in (0, 1, 2, 3, 10, 100, 10007):
        assert prime_sieve(limit).tolist() == list(primerange(2, limit + 1))


def test_mangoldt_table():
    table = mangoldt_table(50)
    for n in range(51):
        assert table[n] == pytest.approx(von_mangoldt(n))


def test_parse_lists():
    assert parse_int_list("1, 3,5") == [1, 3, 5]
    assert parse_float_list("0.5 2") == [0.5, 2.0]
    with pytest.raises(ValueError):
        parse_int_list("1,x")
    with pytest.raises(ValueError):
        parse_int_list("  ")


def test_format_number_round_trips():
    for value in (0.1, 1 / 3, math.pi * 1e-300, -2.5e17, 1.1518355e-5):
        assert float(format_number(value)) == value
    assert format_number(None) == ""
    assert format_number(7) == "7"
    assert format_number(np.int64(3)) == "3"
    assert format_number(0.5) == "0.5"


def test_compensated_sum_is_exact():
    values = [1e16, 1.0, -1e16] * 3
    assert compensated_sum(values) == 3.0
    assert compensated_sum(np.array(values)) == 3.0


def test_index_subset():
    assert index_subset("1-3", 5) == [0, 1, 2]
    assert index_subset("2,5", 5) == [1, 4]
    with pytest.raises(ValueError):
        index_subset("6", 5)


def test_max_abs():
    assert max_abs([]) == 0.0
    assert max_abs([-3.0, 2.0]) == 3.0
