"""Small exact number-theoretic helpers (thin wrappers over sympy plus sieves)."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt

import gmpy2
import numpy as np
from sympy import bernoulli as _sympy_bernoulli
from sympy import divisors as _sympy_divisors
from sympy import factorint, mobius as _sympy_mobius, primefactors


def prime_divisors(n: int) -> list[int]:
    return [int(p) for p in primefactors(n)]


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    return all(e == 1 for e in factorint(n).values())


def divisors(n: int) -> list[int]:
    return [int(d) for d in _sympy_divisors(n)]


def mobius(n: int) -> int:
    return int(_sympy_mobius(n))


def sigma(n: int, e: int) -> int:
    """Sum of e-th powers of the positive divisors of n."""
    return sum(d**e for d in divisors(n))


def sigma_table(upto: int, e: int) -> list[int]:
    """[sigma_e(0)=0, sigma_e(1), ..., sigma_e(upto)] by a divisor sieve."""
    table = [0] * (upto + 1)
    for d in range(1, upto + 1):
        p = d**e
        for m in range(d, upto + 1, d):
            table[m] += p
    return table


def divisor_count_table(upto: int) -> np.ndarray:
    """Array t with t[n] = number of divisors of n, t[0] = 0."""
    t = np.zeros(upto + 1, dtype=np.int64)
    for d in range(1, upto + 1):
        t[d::d] += 1
    return t


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def kronecker(d: int, n: int) -> int:
    return int(gmpy2.kronecker(d, n))


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Bernoulli number with the convention B_1 = -1/2."""
    if n == 1:
        return Fraction(-1, 2)
    b = _sympy_bernoulli(n)
    return Fraction(int(b.p), int(b.q))


def bernoulli_polynomial(n: int, x: Fraction) -> Fraction:
    return sum(
        (comb(n, j) * bernoulli_number(j) * x ** (n - j) for j in range(n + 1)),
        Fraction(0),
    )


@lru_cache(maxsize=None)
def generalized_bernoulli(n: int, disc: int) -> Fraction:
    """B_{n, chi} for the Kronecker character chi = (disc / .), disc fundamental."""
    f = abs(disc)
    if f == 1:
        return bernoulli_polynomial(n, Fraction(1))
    # f^(n-1) sum_a chi(a) B_n(a/f) regrouped by powers of a
    chis = [(a, kronecker(disc, a)) for a in range(1, f + 1)]
    power_sums = [sum(c * a**e for a, c in chis if c) for e in range(n + 1)]
    total = Fraction(0)
    for j in range(n + 1):
        if power_sums[n - j]:
            total += comb(n, j) * bernoulli_number(j) * Fraction(f) ** (j - 1) * power_sums[n - j]
    return total


def fundamental_decomposition(disc: int) -> tuple[int, int]:
    """Write a nonzero discriminant (0 or 1 mod 4) as D * f**2 with D fundamental."""
    if disc == 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a nonzero discriminant")
    sign = -1 if disc < 0 else 1
    core, square = 1, 1
    for p, e in factorint(abs(disc)).items():
        core *= int(p) ** (e % 2)
        square *= int(p) ** (e // 2)
    core *= sign
    if core % 4 == 1:
        return core, square
    # core is 2 or 3 mod 4, so 4*core is fundamental and square is even
    return 4 * core, square // 2
