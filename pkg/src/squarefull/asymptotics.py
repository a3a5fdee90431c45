"""Real-argument zeta values, the sinc-squared moment integral, the variance
constant, and the diagonal double sums behind the H^(2/3) law.

The headline constant is

    c_inf = (4 zeta(4/3) / (3 zeta(2))) * integral_0^inf S(y)^2 y^(1/3) dy,

with S(y) = sin(pi y)/(pi y).  The diagonal sum

    2 H^2 sum_b mu^2(b)/b^3 sum_{n>=1} S(n H / b^(3/2))^2

is evaluated by direct truncated summation per b.  For b beyond the small-b
cutoff the scaled inner argument t = H/b^(3/2) is below 1, where the inner
sum collapses exactly to t(1-t)/(2 t^2); summing that over all remaining
squarefree b reduces to partial sums of mu^2(b) b^(-3/2) and mu^2(b) b^(-3),
whose tails are zeta(3/2)/zeta(3) and zeta(3)/zeta(6) minus the finite parts.
That completion is exact (not an asymptotic), and only with it does the
diagonal reach c_inf * H^(2/3) at accessible H; the raw small-b cutoff sum
stays an order of magnitude below it until H is astronomically large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .exactmath import squarefree_values

# B_{2k} for k = 1..16
_BERNOULLI_2K = (
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
    43867 / 798, -174611 / 330, 854513 / 138, -236364091 / 2730, 8553103 / 6,
    -23749461029 / 870, 8615841276005 / 14322, -7709321041217 / 510,
)


def zeta_real(s: float, *, n_terms: int | None = None, n_bernoulli: int = 16) -> float:
    """zeta(s) for real s in [-2, 10], s != 1, by Euler-Maclaurin.

    Direct sum to N plus N^(1-s)/(s-1) + N^(-s)/2 and ``n_bernoulli``
    correction terms.  N defaults small for s < 0: the correction terms grow
    like N^(1-s) there, and float64 rounding of those intermediates, not the
    Euler-Maclaurin remainder, is what limits accuracy.  Absolute error is
    below 1e-12 away from the pole (|s - 1| >= 1e-3).
    """
    if s == 1.0:
        raise ValueError("zeta has a pole at s = 1")
    if not (-2.0 <= s <= 10.0):
        raise ValueError("zeta_real is validated on s in [-2, 10] only")
    if n_terms is None:
        n_terms = 16 if s < 0 else 64
    if not (1 <= n_bernoulli <= len(_BERNOULLI_2K)):
        raise ValueError(f"n_bernoulli must be in [1, {len(_BERNOULLI_2K)}]")
    big_n = n_terms
    n = np.arange(1, big_n, dtype=np.float64)
    total = float(np.sum(n ** (-s)))
    total += 0.5 * big_n ** (-s) + big_n ** (1 - s) / (s - 1)
    for k in range(1, n_bernoulli + 1):
        rising = 1.0
        for j in range(2 * k - 1):
            rising *= s + j
        total += _BERNOULLI_2K[k - 1] / math.factorial(2 * k) * rising * big_n ** (-s - 2 * k + 1)
    return total


def _trigamma(x: float) -> float:
    """psi'(x) for x >= 1: recurrence-shift to x >= 32, then the asymptotic
    series (relative error < 1e-14)."""
    shift = 0.0
    while x < 32.0:
        shift += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv * (
        1.0 + inv * (0.5 + inv * (1.0 / 6 + inv2 * (-1.0 / 30 + inv2 * (1.0 / 42 - inv2 / 30))))
    )
    return shift + series


def sinc_moment(*, y_split: float = 2000.0, n_nodes: int = 32) -> float:
    """integral_0^inf S(y)^2 y^(1/3) dy with S(y) = sin(pi y)/(pi y).

    [0, 1] is integrated after the substitution y = u^3 (removes the y^(1/3)
    cusp), [1, y_split] by Gauss-Legendre on unit panels, and the tail uses
    S(y)^2 = (1 - cos 2 pi y)/(2 pi^2 y^2): the non-oscillatory part
    integrates to (3/(4 pi^2)) y_split^(-2/3) and two integrations by parts
    reduce the cosine part to boundary terms plus an O(y_split^(-8/3))
    remainder that is dropped.  Absolute error is far below 1e-8.
    """
    if y_split < 8:
        raise ValueError("y_split too small for the tail expansion")
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    u = 0.5 * nodes + 0.5
    y = u**3
    s = np.sin(np.pi * y) / (np.pi * y)
    total = 3.0 * float(np.sum(0.5 * weights * s * s * y))
    edges = np.arange(1.0, math.floor(y_split) + 0.5)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    yy = (half[:, None] * nodes[None, :] + mid[:, None]).ravel()
    sy = np.sin(np.pi * yy) / (np.pi * yy)
    total += float(np.sum((half[:, None] * weights[None, :]).ravel() * sy * sy * np.cbrt(yy)))
    y0 = float(math.floor(y_split))
    c = 1.0 / (2 * math.pi**2)
    total += c * 1.5 * y0 ** (-2.0 / 3)
    cos_part = -math.sin(2 * math.pi * y0) / (2 * math.pi) * y0 ** (-5.0 / 3)
    cos_part += (5.0 / (6 * math.pi)) * math.cos(2 * math.pi * y0) / (2 * math.pi) * y0 ** (-8.0 / 3)
    return total - c * cos_part


@dataclass(frozen=True)
class ZetaConstants:
    """Cached real zeta values and the derived variance constant."""

    z32: float  # zeta(3/2)
    z3: float   # zeta(3)
    z23: float  # zeta(2/3), negative
    z2: float   # zeta(2) = pi^2/6
    z43: float  # zeta(4/3)
    theta1: float  # zeta(3/2)/zeta(3)
    theta2: float  # zeta(2/3)/zeta(2), negative
    sinc_moment: float
    c_inf: float   # (4 z43 / (3 z2)) * sinc_moment


@lru_cache(maxsize=1)
def zeta_constants() -> ZetaConstants:
    z32 = zeta_real(1.5)
    z3 = zeta_real(3.0)
    z23 = zeta_real(2.0 / 3.0)
    z2 = zeta_real(2.0)
    z43 = zeta_real(4.0 / 3.0)
    moment = sinc_moment()
    return ZetaConstants(
        z32=z32,
        z3=z3,
        z23=z23,
        z2=z2,
        z43=z43,
        theta1=z32 / z3,
        theta2=z23 / z2,
        sinc_moment=moment,
        c_inf=4.0 * z43 / (3.0 * z2) * moment,
    )


def c_infinity(moment: float | None = None) -> float:
    """(4 zeta(4/3) / (3 zeta(2))) * sinc_moment; linear in the moment."""
    zc = zeta_constants()
    if moment is None:
        return zc.c_inf
    return 4.0 * zc.z43 / (3.0 * zc.z2) * moment


def squarefree_harmonic(s: float, b_max: int) -> float:
    """Partial sum of mu^2(b) b^(-s) over b <= b_max."""
    bs = squarefree_values(b_max).astype(np.float64)
    return float(np.sum(bs ** (-s)))


@dataclass(frozen=True)
class DiagonalParams:
    """Configuration for the diagonal double sum.

    ``b_cut`` is H^(2/3 + eps).  Inner sums over n are truncated at
    N_b = ceil(b^(3/2)/H) * inner_scale and corrected by the analytic smooth
    tail; truncation is then extended until the oscillatory remainder bound
    (envelope S(t)^2 <= 1/(pi t)^2 with Abel summation) is below
    ``target_rel_error`` of the predicted scale.  ``complete_tail`` adds the
    exact b > b_cut completion described in the module docstring.
    """

    H: float
    eps: float = 0.005
    target_rel_error: float = 1e-8
    complete_tail: bool = True
    inner_scale: int = 1 << 14
    inner_cap: int = 1 << 24

    def __post_init__(self) -> None:
        if self.H < 1:
            raise ValueError("diagonal sums require H >= 1")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    @property
    def b_cut(self) -> float:
        return self.H ** (2.0 / 3.0 + self.eps)


def _inner_sinc_sum(t: float, n_init: int, budget: float, cap: int) -> tuple[float, float]:
    """sum_{n>=1} S(n t)^2 by truncation at >= n_init terms.

    Adds the smooth half of the tail, (1/(2 pi^2 t^2)) psi'(N+1); the
    oscillatory half is bounded and the truncation extended until that bound
    (in the 2 H^2 / b^3 normalized units, i.e. multiplied by 1/pi^2) is
    within ``budget``.  Returns (inner sum, normalized residual bound).
    """
    pit = math.pi * t
    inv_2pt = 1.0 / (2.0 * pit * pit)
    resonance = max(abs(math.sin(pit)), 1e-18)
    n_hi = 0
    partial = 0.0
    n_target = n_init
    while True:
        n = np.arange(n_hi + 1, n_target + 1, dtype=np.float64)
        sn = np.sin(np.pi * (n * t))
        partial += float(np.sum(sn * sn / (n * n)))
        n_hi = n_target
        bound = min(_trigamma(n_hi + 1.0), 1.0 / (resonance * (n_hi + 1.0) ** 2)) / math.pi**2
        if bound <= budget or n_hi >= cap:
            break
        n_target = min(2 * n_hi, cap)
    return partial / (pit * pit) + _trigamma(n_hi + 1.0) * inv_2pt, bound


def diagonal_sum_with_bound(p: DiagonalParams) -> tuple[float, float]:
    """Diagonal double sum plus the achieved truncation-residual bound."""
    h = p.H
    cut = int(p.b_cut)
    bs = squarefree_values(cut) if cut >= 1 else np.empty(0, dtype=np.int64)
    scale = max(c_infinity() * h ** (2.0 / 3.0), 1e-30)
    budget_per_b = p.target_rel_error * scale / max(len(bs), 1)
    value = 0.0
    bound_total = 0.0
    for b in bs.tolist():
        b15 = b * math.sqrt(b)
        t = h / b15
        n_init = max(16, math.ceil(b15 / h) * p.inner_scale)
        inner, bound = _inner_sinc_sum(t, n_init, budget_per_b, p.inner_cap)
        value += 2.0 * h * h / b**3 * inner
        bound_total += bound
    if p.complete_tail:
        zc = zeta_constants()
        bsf = bs.astype(np.float64)
        part32 = float(np.sum(bsf**-1.5))
        part3 = float(np.sum(bsf**-3.0))
        tail32 = zc.theta1 - part32
        tail3 = zc.z3 / zeta_real(6.0) - part3
        value += h * tail32 - h * h * tail3
    return value, bound_total


def diagonal_sum(p: DiagonalParams) -> float:
    """2 H^2 sum_b mu^2(b)/b^3 sum_n S(n H / b^(3/2))^2, see DiagonalParams."""
    return diagonal_sum_with_bound(p)[0]


def windowed_diagonal_sum(
    h: float,
    eps: float,
    window: Callable[[np.ndarray], np.ndarray],
    *,
    inner_scale: int = 1 << 14,
) -> float:
    """2 H^2 sum_{b <= H^(2/3+eps)} mu^2(b)/b^3 sum_n |w(n H / b^(3/2))|^2.

    ``window`` must accept a float array (scalar-only callables are wrapped).
    Truncation at N_b = ceil(b^(3/2)/H) * inner_scale relies on the window's
    derivative-envelope decay |w(y)| = O(1/y); no analytic tail is added, so
    this is the plain cutoff sum.
    """
    if h < 1:
        raise ValueError("windowed sums require H >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    cut = int(h ** (2.0 / 3.0 + eps))
    bs = squarefree_values(cut) if cut >= 1 else np.empty(0, dtype=np.int64)
    total = 0.0
    vectorized = None
    for b in bs.tolist():
        b15 = b * math.sqrt(b)
        t = h / b15
        n_b = max(16, math.ceil(b15 / h) * inner_scale)
        y = np.arange(1, n_b + 1, dtype=np.float64) * t
        if vectorized is None:
            try:
                w = np.asarray(window(y), dtype=np.complex128)
                if w.shape != y.shape:
                    raise TypeError
                vectorized = window
            except (TypeError, ValueError):
                vectorized = np.vectorize(window, otypes=[np.complex128])
                w = vectorized(y)
        else:
            w = np.asarray(vectorized(y), dtype=np.complex128)
        total += 2.0 * h * h / b**3 * float(np.sum(np.abs(w) ** 2))
    return total


def bump_c4(x: np.ndarray | float) -> np.ndarray | float:
    """C^4 polynomial-spline bump: 1 on |x| <= 1, 0 on |x| >= 2.

    The transition uses the degree-9 smoothstep u^5 (126 - 420 u + 540 u^2
    - 315 u^3 + 70 u^4) of u = 2 - |x|, which matches value and four
    derivatives at both junctions.  Derivative sups on the real line:
    |h'| <= 2.461, |h''| <= 9.372, |h'''| <= 78.75, |h''''| <= 622.6.
    """
    arr = np.asarray(x, dtype=np.float64)
    u = np.clip(2.0 - np.abs(arr), 0.0, 1.0)
    s = u**5 * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + u * 70.0))))
    if np.isscalar(x):
        return float(s)
    return s
