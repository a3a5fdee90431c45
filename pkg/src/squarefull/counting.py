"""Exact counts of squarefull numbers: Q(x), short-interval counts with the
window (x, (sqrt(x)+H)^2], and the two-term Bateman-Grosswald approximation.

Q(x) = sum over squarefree b of floor(sqrt(x / b^3)), which needs only
O(x^(1/3)) sieve work.  Interval boundaries involve sqrt(x), so membership
n <= (sqrt(x)+H)^2 is decided by clearing denominators of the rational H and
comparing squares of integers; no floating-point decision anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import asymptotics
from .exactmath import icbrt, squarefree_sieve

RationalLike = int | float | str | Fraction

#: above this, x // b^3 may not fit the vectorized int64 path
_VECTOR_LIMIT = 2**62


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce to an exact rational (floats convert exactly)."""
    return Fraction(value)


@dataclass(frozen=True)
class CountResult:
    """Exact count at x next to its two-term approximation."""

    x: int
    q: int
    bg2: float
    err: float


def isqrt_array(v: np.ndarray) -> np.ndarray:
    """Exact floor square roots of an int64 array (all entries < 2^62).

    Float sqrt gives the guess; one exact integer correction pass fixes the
    off-by-one cases near perfect squares.
    """
    r = np.sqrt(v.astype(np.float64)).astype(np.int64)
    r -= (r * r > v).astype(np.int64)
    r += ((r + 1) * (r + 1) <= v).astype(np.int64)
    return r


def count_upto(x: int) -> int:
    """Q(x): number of squarefull n <= x, exactly."""
    if x < 0:
        raise ValueError("count_upto requires x >= 0")
    if x == 0:
        return 0
    b_max = icbrt(x)
    table = squarefree_sieve(1, b_max)
    bs = np.nonzero(table.flags)[0].astype(np.int64) + 1
    if x < _VECTOR_LIMIT:
        quotients = x // (bs * bs * bs)
        return int(np.sum(isqrt_array(quotients)))
    total = 0
    for b in bs.tolist():
        total += math.isqrt(x // (b * b * b))
    return total


def bg_approx(x: float) -> float:
    """Two-term approximation theta1*sqrt(x) + theta2*x^(1/3)."""
    if x <= 0:
        raise ValueError("bg_approx requires x > 0")
    zc = asymptotics.zeta_constants()
    return zc.theta1 * math.sqrt(x) + zc.theta2 * _cbrt(x)


def _cbrt(x: float) -> float:
    """Real cube root with one Newton polish (near correctly rounded)."""
    r = x ** (1.0 / 3.0)
    return r - (r * r * r - x) / (3.0 * r * r)


def count_result(x: int) -> CountResult:
    q = count_upto(x)
    bg2 = bg_approx(float(x))
    return CountResult(x=x, q=q, bg2=bg2, err=q - bg2)


def interval_upper_bound(x: RationalLike, h: RationalLike) -> int:
    """floor((sqrt(x) + H)^2) for rational x >= 0 and rational H > 0, exactly.

    With x = u/v and H = p/q the target is x + H^2 + 2*H*sqrt(x); the floor k
    satisfies k*v*q^2 - u*q^2 - p^2*v <= 2*p*q*sqrt(u*v) < the same at k+1,
    which squares to a pure integer comparison.
    """
    xf = as_fraction(x)
    hf = as_fraction(h)
    if xf < 0 or hf <= 0:
        raise ValueError("need x >= 0 and H > 0")
    u, v = xf.numerator, xf.denominator
    p, q = hf.numerator, hf.denominator
    rhs_sq = 4 * p * p * q * q * u * v

    def below_or_equal(k: int) -> bool:
        # k <= x + H^2 + 2H sqrt(x), scaled by v*q^2:
        # k v q^2 - u q^2 - p^2 v <= 2 p q sqrt(u v), squared when positive.
        lhs = k * v * q * q - u * q * q - p * p * v
        if lhs <= 0:
            return True
        return lhs * lhs <= rhs_sq

    k = int(float(xf) + float(hf) ** 2 + 2.0 * float(hf) * math.sqrt(float(xf)))
    while not below_or_equal(k):
        k -= 1
    while below_or_equal(k + 1):
        k += 1
    return k


def interval_count(x: RationalLike, h: RationalLike) -> int:
    """Number of squarefull n with x < n <= (sqrt(x) + H)^2, exactly."""
    xf = as_fraction(x)
    if xf < 1:
        raise ValueError("interval_count requires x >= 1")
    upper = interval_upper_bound(xf, h)
    lower = int(xf)  # n > x  <=>  n > floor(x) for integer n
    return count_upto(upper) - count_upto(lower)
