"""Shared test oracles.

The brute-force squarefull oracle never touches the a^2 b^3 representation:
a number survives iff every prime dividing it divides it twice, decided by
sieve marking.  That keeps it independent of the enumeration under test.
"""

from __future__ import annotations

import functools
import math

import numpy as np
import pytest


@functools.lru_cache(maxsize=4)
def brute_squarefull_flags(limit: int) -> np.ndarray:
    """flags[n] == True iff n is squarefull, for 1 <= n <= limit."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[0] = False
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
            view = flags[p::p]
            kill = np.ones(len(view), dtype=bool)
            kill[p - 1 :: p] = False  # keep n = p*k only when p | k
            view[kill] = False
    big_primes = np.nonzero(sieve)[0]
    big_primes = big_primes[big_primes * big_primes > limit]
    for p in big_primes:
        flags[p::p] = False
    return flags


def brute_squarefull_set(limit: int) -> set[int]:
    return set(np.nonzero(brute_squarefull_flags(limit))[0].tolist())


def squarefree_part(n: int) -> int:
    """b in the factorization n = a^2 b^3 of a squarefull n, by trial division."""
    b = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                e += 1
                n //= d
            if e % 2 == 1:
                b *= d
        d += 1
    if n > 1:
        raise ValueError("leftover prime to the first power: not squarefull")
    return b


@pytest.fixture(scope="session")
def brute_flags_2e6() -> np.ndarray:
    return brute_squarefull_flags(2_100_000)
