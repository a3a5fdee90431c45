"""Exact evaluation of short-interval variance integrals by event sweep.

For a window parameter H, the restricted count

    C(x) = #{ squarefull n : x < n <= (sqrt(x) + H)^2, b in range }

is a step function of x: the number n (with representation a^2 b^3) is
counted exactly while x lies in [(sqrt(n) - H)^2, n).  Over a dyadic window
[X, 2X] the integral (1/X) * int (C(x) - mean)^2 dx is therefore a finite sum
of segment lengths times squared integer deviations, evaluated here exactly
segment by segment.

Event positions: exits sit at the integers n; entries sit at
(sqrt(m) - H)^2 = m + H^2 - 2 H sqrt(m), computed in double-double so the
stored float64 position is correctly rounded.  Within one family positions
are monotone in the defining integer, so ordering is exact; cross-family
near-ties are resolved by an exact integer sign test (H is always held as an
exact rational).  Counted interval is half-open: at x = n the number n is
excluded.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import asymptotics
from .counting import as_fraction, interval_upper_bound
from .exactmath import enumerate_squarefull_arrays, icbrt, squarefree_values

#: positions are stored as float64; window tops must stay exactly representable
_FLOAT_EXACT_LIMIT = 1 << 53

#: cross-family gaps below this trigger the exact-order fix-up
_NEAR_TIE = 2.0**-20


class PrecisionAlarm(ValueError):
    """Event positions cannot be represented or ordered reliably."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One variance experiment: dyadic window [X, 2X], interval parameter H,
    and the two b-range cuts H^(2/3+eps) and X^(1/3)/H^lam.

    ``lam`` defaults to 2/9 - eps/3, the largest value for which the
    large-b remainder stays negligible.
    """

    X: int
    H: Fraction
    eps: float = 0.005
    lam: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "H", as_fraction(self.H))
        if self.lam is None:
            object.__setattr__(self, "lam", 2.0 / 9.0 - self.eps / 3.0)
        if self.X < 1:
            raise ValueError("X must be a positive integer")
        if self.H <= 0:
            raise ValueError("H must be positive")
        if not (0.0 < self.eps < 0.01):
            raise ValueError("eps must lie in (0, 0.01)")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.window_top >= _FLOAT_EXACT_LIMIT:
            raise PrecisionAlarm(
                f"window top {self.window_top} exceeds exact float64 range; "
                "positions could not be represented faithfully"
            )

    @property
    def h_float(self) -> float:
        return float(self.H)

    @property
    def window_top(self) -> int:
        """floor((sqrt(2X) + H)^2): largest integer that can produce an event."""
        return interval_upper_bound(2 * self.X, self.H)

    @property
    def b_max(self) -> int:
        return icbrt(self.window_top)

    @property
    def b_small_cut(self) -> float:
        return self.h_float ** (2.0 / 3.0 + self.eps)

    @property
    def b_large_cut(self) -> float:
        return self.X ** (1.0 / 3.0) / self.h_float**self.lam

    @property
    def middle_empty(self) -> bool:
        return self.b_small_cut >= self.b_large_cut


@dataclass(frozen=True)
class SweepEvent:
    """One breakpoint of the step integrand.

    ``kind`` is "upper-entry" (+1, the number enters through the moving upper
    boundary) or "lower-exit" (-1, x has reached the number itself).
    """

    pos: float
    jump: int
    kind: str
    b: int


@dataclass(frozen=True)
class VarianceReport:
    """Variance over [X, 2X] with its b-range split.

    J1/J2/I2 are the variances restricted to b <= H^(2/3+eps), the middle
    range, and b > X^(1/3)/H^lam, each about its own truncated mean; I1
    covers b up to the large cut.  ``cross_bound`` is the Cauchy-Schwarz
    envelope 2 sqrt(I1 I2) + 2 sqrt(J1 J2) for the recomposition defect
    |total - (J1 + J2 + I2)|.  ``total_theta1_mean`` restates the total
    variance about the untruncated mean theta1 * H as a diagnostic.

    When the cuts cross (``middle_empty``), J2 covers the empty range and
    the large range starts at the small cut instead, so the three ranges
    still partition the b axis.
    """

    X: int
    H: float
    eps: float
    lam: float
    total: float
    I1: float
    I2: float
    J1: float
    J2: float
    cross_bound: float
    predicted: float
    ratio: float
    event_count: int
    b_small_cut: float
    b_large_cut: float
    mean_truncated: float
    mean_theta1: float
    total_theta1_mean: float
    middle_empty: bool

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


# ---------------------------------------------------------------------------
# double-double helpers (vectorized; enough structure for m + H^2 - 2H sqrt m)
# ---------------------------------------------------------------------------

_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_sqrt(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """sqrt of exactly-representable integers m, as a (hi, lo) pair."""
    hi = np.sqrt(m)
    p, pe = _two_prod(hi, hi)
    lo = ((m - p) - pe) / (2.0 * hi)
    return hi, lo


def _entry_positions(m: np.ndarray, h: Fraction) -> np.ndarray:
    """Correctly rounded float64 values of m + H^2 - 2 H sqrt(m)."""
    h_hi = float(h)
    h_lo = float(h - Fraction(h_hi))
    s_hi, s_lo = _dd_sqrt(m)
    # q = 2 H sqrt(m)
    q_hi, q_err = _two_prod(2.0 * h_hi, s_hi)
    q_lo = q_err + 2.0 * (h_hi * s_lo + h_lo * s_hi)
    # a = m + H^2
    h2 = h * h
    h2_hi = float(h2)
    h2_lo = float(h2 - Fraction(h2_hi))
    a_hi, a_lo = _two_sum(m, h2_hi)
    a_lo = a_lo + h2_lo
    d_hi, d_lo = _two_sum(a_hi, -q_hi)
    return d_hi + (d_lo + a_lo - q_lo)


def _compare_entry_exit(m: int, n: int, p: int, q: int) -> int:
    """Exact sign of (sqrt(m) - p/q)^2 - n (entry position minus exit position)."""
    a = q * q * (m - n) + p * p
    if a <= 0:
        return -1
    d = a * a - 4 * p * p * q * q * m
    return (d > 0) - (d < 0)


# ---------------------------------------------------------------------------
# event assembly
# ---------------------------------------------------------------------------


def window_enumeration(cfg: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    """(n, b) arrays of every squarefull number in (X, window_top]."""
    _, b, n = enumerate_squarefull_arrays(cfg.X + 1, cfg.window_top)
    return n, b


def _event_arrays(
    cfg: ExperimentConfig,
    b_lo: int,
    b_hi: int,
    enum: tuple[np.ndarray, np.ndarray] | None = None,
):
    """Sorted event arrays (pos, jump, b, kind, payload) plus the count at X.

    ``payload`` is the defining integer (m for entries, n for exits), kept for
    exact near-tie resolution.
    """
    if b_lo > b_hi or b_hi < 1:
        empty = np.empty(0)
        return (
            empty,
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.uint8),
            np.empty(0, dtype=np.int64),
            0,
        )
    n, b = enum if enum is not None else window_enumeration(cfg)
    sel = (b >= b_lo) & (b <= b_hi)
    n = n[sel]
    b = b[sel]
    upper0 = interval_upper_bound(cfg.X, cfg.H)  # floor((sqrt X + H)^2)
    is_entry = n > upper0
    is_exit = n <= 2 * cfg.X
    c0 = int(np.count_nonzero(~is_entry))  # n in (X, (sqrt X + H)^2]
    m_entry = n[is_entry]
    pos_entry = _entry_positions(m_entry.astype(np.float64), cfg.H)
    np.clip(pos_entry, float(cfg.X), float(2 * cfg.X), out=pos_entry)
    pos = np.concatenate([pos_entry, n[is_exit].astype(np.float64)])
    jump = np.concatenate(
        [np.ones(len(m_entry), dtype=np.int64), -np.ones(int(is_exit.sum()), dtype=np.int64)]
    )
    kind = np.concatenate(
        [np.zeros(len(m_entry), dtype=np.uint8), np.ones(int(is_exit.sum()), dtype=np.uint8)]
    )
    evb = np.concatenate([b[is_entry], b[is_exit]])
    payload = np.concatenate([m_entry, n[is_exit]])
    order = np.lexsort((kind, pos))
    pos, jump, kind, evb, payload = (
        pos[order],
        jump[order],
        kind[order],
        evb[order],
        payload[order],
    )
    _fix_near_ties(cfg, pos, jump, kind, evb, payload)
    return pos, jump, evb, kind, payload, c0


def _fix_near_ties(cfg, pos, jump, kind, evb, payload) -> None:
    """Re-sort clusters of nearly coincident cross-family events exactly.

    Within a family the float order already agrees with the exact order
    (positions are monotone in the payload), so only mixed clusters need the
    integer sign test.
    """
    if len(pos) < 2:
        return
    thr = max(_NEAR_TIE, 4.0 * np.spacing(float(2 * cfg.X)))
    close = np.nonzero(np.diff(pos) <= thr)[0]
    if len(close) == 0:
        return
    p, q = cfg.H.numerator, cfg.H.denominator

    def cmp(i: int, j: int) -> int:
        ki, kj = kind[i], kind[j]
        if ki == kj:
            return (payload[i] > payload[j]) - (payload[i] < payload[j])
        if ki == 0:
            s = _compare_entry_exit(int(payload[i]), int(payload[j]), p, q)
            return -1 if s == 0 else s  # equal positions: entry first
        s = _compare_entry_exit(int(payload[j]), int(payload[i]), p, q)
        return 1 if s == 0 else -s

    # group adjacent close pairs into clusters
    start = int(close[0])
    prev = start
    clusters = []
    for idx in close[1:]:
        if idx == prev + 1:
            prev = int(idx)
        else:
            clusters.append((start, prev + 1))
            start = int(idx)
            prev = start
    clusters.append((start, prev + 1))
    for lo, hi in clusters:
        if len(set(kind[lo : hi + 1].tolist())) == 1:
            continue
        idx = list(range(lo, hi + 1))
        idx.sort(key=functools.cmp_to_key(cmp))
        for arr in (pos, jump, kind, evb, payload):
            arr[lo : hi + 1] = arr[idx]


def build_events(
    cfg: ExperimentConfig, b_range: tuple[int, int] | None = None
) -> list[SweepEvent]:
    """Sorted sweep events for the window, restricted to b in ``b_range``.

    One lower-exit per squarefull n in (X, 2X], one upper-entry per
    squarefull m in ((sqrt X + H)^2, (sqrt 2X + H)^2]; ties are ordered
    upper-entry before lower-exit.
    """
    b_lo, b_hi = b_range if b_range is not None else (1, cfg.b_max)
    if b_lo < 1:
        raise ValueError("b range must start at 1 or above")
    pos, jump, evb, kind, _, _ = _event_arrays(cfg, b_lo, b_hi)
    names = ("upper-entry", "lower-exit")
    return [
        SweepEvent(pos=float(pi), jump=int(ji), kind=names[ki], b=int(bi))
        for pi, ji, ki, bi in zip(pos, jump, kind, evb)
    ]


def restricted_mean(cfg: ExperimentConfig, b_lo: int = 1, b_hi: int | None = None) -> float:
    """H * sum of mu^2(b) b^(-3/2) over b in [b_lo, b_hi] (capped at b_max)."""
    b_hi = cfg.b_max if b_hi is None else min(b_hi, cfg.b_max)
    if b_lo > b_hi:
        return 0.0
    bs = squarefree_values(b_hi).astype(np.float64)
    bs = bs[bs >= b_lo]
    return cfg.h_float * float(np.sum(bs**-1.5))


def _segment_moments(
    cfg: ExperimentConfig, pos, jump_masked, c0: int, mean: float
) -> tuple[float, float]:
    """(int (C - mean)^2 dx, int (C - mean) dx) over [X, 2X]."""
    bounds = np.concatenate([[float(cfg.X)], pos, [float(2 * cfg.X)]])
    dx = np.diff(bounds)
    counts = np.concatenate([[c0], c0 + np.cumsum(jump_masked)])
    if counts.min() < 0:
        raise PrecisionAlarm("running count went negative: event order is inconsistent")
    dev = counts - mean
    return float(np.sum(dx * dev * dev)), float(np.sum(dx * dev))


def variance_exact(
    cfg: ExperimentConfig,
    b_range: tuple[int, int],
    mean: float,
    enum: tuple[np.ndarray, np.ndarray] | None = None,
) -> float:
    """(1/X) * int_X^2X (C(x) - mean)^2 dx for the b-restricted count, exactly.

    ``mean`` is supplied by the caller (normally
    H * sum mu^2(b) b^(-3/2) over the same range; see restricted_mean).
    """
    b_lo, b_hi = b_range
    pos, jump, _, _, _, c0 = _event_arrays(cfg, b_lo, b_hi, enum)
    b2, _ = _segment_moments(cfg, pos, jump, c0, mean)
    return b2 / cfg.X


def variance_report(
    cfg: ExperimentConfig, enum: tuple[np.ndarray, np.ndarray] | None = None
) -> VarianceReport:
    """Full-window variance with the b-range decomposition, in one sweep."""
    if enum is None:
        enum = window_enumeration(cfg)
    pos, jump, evb, kind, payload, _ = _event_arrays(cfg, 1, cfg.b_max, enum)
    n_all, b_all = enum
    upper0 = interval_upper_bound(cfg.X, cfg.H)
    active0 = n_all <= upper0

    cut1 = cfg.b_small_cut
    cut2 = max(cfg.b_large_cut, cut1)
    fam = np.where(evb <= cut1, 0, np.where(evb <= cut2, 1, 2))
    fam0 = np.where(b_all <= cut1, 0, np.where(b_all <= cut2, 1, 2))

    bs = squarefree_values(cfg.b_max).astype(np.float64)
    weights = bs**-1.5
    h = cfg.h_float
    mean_j1 = h * float(np.sum(weights[bs <= cut1]))
    mean_j2 = h * float(np.sum(weights[(bs > cut1) & (bs <= cut2)]))
    mean_i2 = h * float(np.sum(weights[bs > cut2]))
    mean_total = mean_j1 + mean_j2 + mean_i2

    def fam_variance(member: np.ndarray, member0: np.ndarray, mean: float):
        c0 = int(np.count_nonzero(active0 & member0))
        b2, b1 = _segment_moments(cfg, pos, np.where(member, jump, 0), c0, mean)
        return b2 / cfg.X, b1

    var_j1, _ = fam_variance(fam == 0, fam0 == 0, mean_j1)
    var_j2, _ = fam_variance(fam == 1, fam0 == 1, mean_j2)
    var_i2, _ = fam_variance(fam == 2, fam0 == 2, mean_i2)
    var_i1, _ = fam_variance(fam <= 1, fam0 <= 1, mean_j1 + mean_j2)
    total, b1_total = fam_variance(np.ones_like(fam, dtype=bool), np.ones_like(fam0, dtype=bool), mean_total)

    zc = asymptotics.zeta_constants()
    mean_theta1 = zc.theta1 * h
    shift = mean_total - mean_theta1
    total_theta1 = total + (2.0 * shift * b1_total + shift * shift * cfg.X) / cfg.X

    predicted = zc.c_inf * h ** (2.0 / 3.0)
    cross = 2.0 * math.sqrt(max(var_i1 * var_i2, 0.0)) + 2.0 * math.sqrt(max(var_j1 * var_j2, 0.0))
    return VarianceReport(
        X=cfg.X,
        H=h,
        eps=cfg.eps,
        lam=cfg.lam,
        total=total,
        I1=var_i1,
        I2=var_i2,
        J1=var_j1,
        J2=var_j2,
        cross_bound=cross,
        predicted=predicted,
        ratio=total / predicted if predicted else math.inf,
        event_count=len(pos),
        b_small_cut=cut1,
        b_large_cut=cfg.b_large_cut,
        mean_truncated=mean_total,
        mean_theta1=mean_theta1,
        total_theta1_mean=total_theta1,
        middle_empty=cfg.middle_empty,
    )
