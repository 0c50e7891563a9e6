"""Elementary arithmetic: factoring, Euler phi, von Mangoldt, units, primitive roots."""
import math
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import factorint

from utils.errors import DomainError, NonUnitResidueError


@lru_cache(maxsize=4096)
def _factor_items(n: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted((int(p), int(e)) for p, e in factorint(n).items()))


def factorize(n: int) -> Dict[int, int]:
    """Prime factorisation of n >= 1 as {p: e}."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    return dict(_factor_items(n))


def euler_phi(n: int) -> int:
    """Euler's totient."""
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def von_mangoldt(n: int) -> float:
    """Lambda(n): log p if n is a power of the prime p, else 0."""
    if n <= 1:
        return 0.0
    items = _factor_items(n)
    if len(items) != 1:
        return 0.0
    return math.log(items[0][0])


def is_unit(a: int, q: int) -> bool:
    return math.gcd(a % q, q) == 1


def require_unit(a: int, q: int, flag: Optional[str] = None) -> int:
    """Reduce a mod q, raising NonUnitResidueError (naming flag, if given) if it is not a unit."""
    r = a % q
    if math.gcd(r, q) != 1:
        raise NonUnitResidueError(a, q, flag)
    return r


def units(q: int) -> List[int]:
    """Reduced residues mod q in increasing order."""
    return [a for a in range(1, q) if math.gcd(a, q) == 1] if q > 1 else [0]


def mod_inverse(a: int, q: int) -> int:
    return pow(require_unit(a, q), -1, q)


def multiplicative_order(g: int, m: int, group_order: int) -> int:
    """Order of g in (Z/mZ)*, given the group order."""
    order = group_order
    for p in factorize(group_order) if group_order > 1 else {}:
        while order % p == 0 and pow(g, order // p, m) == 1:
            order //= p
    return order


def least_primitive_root(p: int) -> int:
    """Least g that generates (Z/p^2 Z)*, hence (Z/p^e Z)* for every e (p odd)."""
    m = p * p
    group_order = p * (p - 1)
    for g in range(2, m):
        if g % p == 0:
            continue
        if multiplicative_order(g, m, group_order) == group_order:
            return g
    raise DomainError(f"no primitive root modulo {p}^2")


def prime_sieve(limit: int) -> np.ndarray:
    """All primes <= limit, by an odd-only Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_odd_prime = np.ones((limit - 1) // 2 + 1, dtype=bool)  # index i <-> 2i+1
    is_odd_prime[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if is_odd_prime[i]:
            p = 2 * i + 1
            is_odd_prime[(p * p) // 2::p] = False
    odd = 2 * np.flatnonzero(is_odd_prime).astype(np.int64) + 1
    return np.concatenate((np.array([2], dtype=np.int64), odd[odd <= limit]))


def mangoldt_table(limit: int) -> np.ndarray:
    """Array L with L[n] = Lambda(n) for 0 <= n <= limit."""
    table = np.zeros(limit + 1, dtype=np.float64)
    for p in prime_sieve(limit).tolist():
        log_p = math.log(p)
        power = p
        while power <= limit:
            table[power] = log_p
            power *= p
    return table
