import math

import mpmath
import numpy as np
import pytest

from squarefull.asymptotics import (
    DiagonalParams,
    _trigamma,
    bump_c4,
    c_infinity,
    diagonal_sum,
    diagonal_sum_with_bound,
    sinc_moment,
    squarefree_harmonic,
    windowed_diagonal_sum,
    zeta_constants,
    zeta_real,
)
from squarefull.exactmath import squarefree_values

mpmath.mp.dps = 30

# frozen high-precision oracle values (mpmath, 30 digits)
ZETA_3 = 1.2020569031595943
ZETA_2_3 = -2.4475807362336582
SINC_MOMENT_MELLIN = 0.3465885282581034  # (3/(8 pi^2)) Gamma(1/3) (2 pi)^(2/3)


def diag_closed_form(h: float, eps: float, complete: bool = True) -> float:
    """Oracle: sum_n S(nt)^2 = {t}(1-{t})/(2 t^2) exactly (Fourier series of
    the second Bernoulli polynomial), so the diagonal collapses to
    sum_b mu^2(b) {t_b}(1 - {t_b}) with t_b = H / b^(3/2)."""
    cut = int(h ** (2.0 / 3.0 + eps))
    bs = squarefree_values(max(cut, 1)).astype(np.float64)
    bs = bs[bs <= h ** (2.0 / 3.0 + eps)]
    t = h / bs**1.5
    frac = t - np.floor(t)
    total = float(np.sum(frac * (1.0 - frac)))
    if complete:
        z32 = float(mpmath.zeta(1.5))
        z3 = float(mpmath.zeta(3))
        z6 = float(mpmath.zeta(6))
        total += h * (z32 / z3 - float(np.sum(bs**-1.5)))
        total -= h * h * (z3 / z6 - float(np.sum(bs**-3.0)))
    return total


class TestZetaReal:
    def test_zeta2_is_pi_squared_over_six(self):
        assert abs(zeta_real(2.0) - math.pi**2 / 6.0) < 1e-12

    def test_zeta3(self):
        assert zeta_real(3.0) == pytest.approx(ZETA_3, abs=1e-12)

    def test_continuation_below_one(self):
        assert zeta_real(2.0 / 3.0) == pytest.approx(ZETA_2_3, abs=1e-12)

    def test_pole(self):
        with pytest.raises(ValueError, match="pole"):
            zeta_real(1.0)

    def test_grid_against_mpmath(self):
        ss = np.concatenate([np.linspace(-2.0, 0.9, 45), np.linspace(1.1, 10.0, 45)])
        worst = max(abs(zeta_real(float(s)) - float(mpmath.zeta(float(s)))) for s in ss)
        assert worst < 1e-12

    def test_configurable_terms(self):
        assert zeta_real(2.0, n_terms=200, n_bernoulli=10) == pytest.approx(
            math.pi**2 / 6.0, abs=1e-12
        )

    def test_dirichlet_series_tail_envelope(self):
        # partial sums approach zeta from below by the tail envelope
        # N^(1-s)/(s-1); the residual beyond that envelope is < 1e-4
        n = np.arange(1, 10**6 + 1, dtype=np.float64)
        for s in (1.5, 2.0, 3.0):
            partial = float(np.sum(n**-s))
            envelope = (1e6) ** (1.0 - s) / (s - 1.0)
            assert abs(zeta_real(s) - partial - envelope) < 1e-4


class TestSincMoment:
    def test_against_mellin_closed_form(self):
        # derive the closed form independently first:
        # int_0^inf (1 - cos y) y^(-5/3) dy = (3/4) Gamma(1/3), checked by
        # high-precision quadrature, then scaled by a = 2 pi.
        smooth = mpmath.quad(lambda y: (1 - mpmath.cos(y)) / y ** mpmath.mpf("5/3"), [0, 1])
        tail_plain = mpmath.mpf(3) / 2  # int_1^inf y^(-5/3)
        tail_osc = mpmath.quadosc(
            lambda y: mpmath.cos(y) / y ** mpmath.mpf("5/3"), [1, mpmath.inf], period=2 * mpmath.pi
        )
        base = smooth + tail_plain - tail_osc
        assert abs(base - mpmath.mpf(3) / 4 * mpmath.gamma(mpmath.mpf(1) / 3)) < 1e-18
        closed = float(base * (2 * mpmath.pi) ** (mpmath.mpf(2) / 3) / (2 * mpmath.pi**2))
        assert closed == pytest.approx(SINC_MOMENT_MELLIN, abs=1e-15)
        assert abs(sinc_moment() - closed) < 1e-8

    def test_partial_below_full(self):
        nodes, weights = np.polynomial.legendre.leggauss(64)
        y = 0.5 * nodes + 0.5
        s = np.sinc(y) ** 2 * np.cbrt(y)  # np.sinc(y) = sin(pi y)/(pi y)
        partial = float(np.sum(0.5 * weights * s))
        assert 0 < partial < sinc_moment()

    def test_cutoff_stability(self):
        assert abs(sinc_moment(y_split=2000.0) - sinc_moment(y_split=4000.0)) < 1e-8

    def test_monotone_in_cutoff_before_tail(self):
        # the quadrature part alone grows with the cutoff (positive integrand);
        # the analytic tail keeps the total flat
        small = sinc_moment(y_split=500.0)
        large = sinc_moment(y_split=3000.0)
        assert abs(small - large) < 1e-9


class TestConstants:
    def test_signs_and_values(self):
        zc = zeta_constants()
        assert zc.z23 < 0 and zc.theta2 < 0 and zc.c_inf > 0
        assert zc.theta1 == pytest.approx(2.1732543125195541, abs=1e-12)
        assert zc.c_inf == pytest.approx(1.0116261317568756, abs=1e-8)

    def test_c_infinity_product(self):
        zc = zeta_constants()
        assert c_infinity() == pytest.approx(
            4.0 * zc.z43 / (3.0 * zc.z2) * SINC_MOMENT_MELLIN, abs=1e-8
        )

    def test_c_infinity_linear(self):
        assert c_infinity(0.0) == 0.0
        assert c_infinity(2.0 * SINC_MOMENT_MELLIN) == pytest.approx(2.0 * c_infinity(), rel=1e-12)

    def test_recompute_stability(self):
        loose = 4.0 * zeta_real(4 / 3, n_terms=64) / (3.0 * zeta_real(2.0)) * sinc_moment(
            y_split=1000.0
        )
        tight = 4.0 * zeta_real(4 / 3, n_terms=512) / (3.0 * zeta_real(2.0)) * sinc_moment(
            y_split=4000.0, n_nodes=48
        )
        assert abs(loose - tight) < 1e-6

    def test_squarefree_zeta_identity(self):
        # sum_{b<=1e6} mu^2(b) b^(-3/2) approaches zeta(3/2)/zeta(3);
        # the gap is the tail ~ 1.216e-3, i.e. within 1e-3 relative
        zc = zeta_constants()
        partial = squarefree_harmonic(1.5, 10**6)
        assert abs(partial - zc.theta1) <= 1e-3 * zc.theta1

    def test_trigamma(self):
        for x in (8.0, 100.0, 16385.0):
            assert _trigamma(x) == pytest.approx(float(mpmath.polygamma(1, x)), rel=1e-13)


class TestDiagonalSum:
    def test_integer_h_cut_sum_vanishes(self):
        # b_cut < 2 leaves only b = 1, and S(n H) = 0 at integer H
        for h in (1.0, 2.0):
            params = DiagonalParams(H=h, eps=0.005, complete_tail=False)
            assert params.b_cut < 2
            assert abs(diagonal_sum(params)) < 1e-6

    def test_ratio_at_h_1000p5(self):
        value = diagonal_sum(DiagonalParams(H=1000.5, eps=0.005))
        ratio = value / (c_infinity() * 1000.5 ** (2.0 / 3.0))
        assert 0.95 <= ratio <= 1.05

    def test_convergence_trend(self):
        devs = []
        for h in (100.5, 10000.5):
            value = diagonal_sum(DiagonalParams(H=h, eps=0.005))
            devs.append(abs(value / (c_infinity() * h ** (2.0 / 3.0)) - 1.0))
        assert devs[1] < devs[0]

    def test_truncation_bound_honored_vs_closed_form(self):
        # dual route: direct truncated summation against the exact
        # Bernoulli-polynomial closed form
        for h, eps in ((100.5, 0.005), (317.25, 0.008), (1000.5, 0.005)):
            params = DiagonalParams(H=h, eps=eps)
            value, bound = diagonal_sum_with_bound(params)
            oracle = diag_closed_form(h, eps)
            scale = c_infinity() * h ** (2.0 / 3.0)
            assert bound <= params.target_rel_error * scale * 1.001
            assert abs(value - oracle) <= bound + 1e-9 * scale

    def test_direct_summation_oracle_small_h(self):
        # brute force the double sum at small H with a huge flat truncation
        h, eps = 7.5, 0.009
        cut = int(h ** (2 / 3 + eps))
        total = 0.0
        for b in squarefree_values(cut).tolist():
            t = h / b**1.5
            n = np.arange(1, 2 * 10**7 + 1, dtype=np.float64)
            s = np.sin(np.pi * n * t) / (np.pi * n * t)
            total += 2.0 * h * h / b**3 * float(np.sum(s * s))
        got = diagonal_sum(DiagonalParams(H=h, eps=eps, complete_tail=False))
        assert got == pytest.approx(total, abs=2e-7)

    def test_bounded_ratio_band(self):
        c = c_infinity()
        for h in (100.5, 1000.5, 31623.5, 100000.5):
            value = diagonal_sum(DiagonalParams(H=h))
            ratio = value / (c * h ** (2.0 / 3.0))
            assert 0.5 <= ratio <= 1.5

    def test_h_below_one_rejected(self):
        with pytest.raises(ValueError):
            DiagonalParams(H=0.5)


class TestWindowedDiagonalSum:
    def test_zero_window(self):
        assert windowed_diagonal_sum(100.5, 0.005, lambda y: np.zeros_like(y)) == 0.0

    def test_sinc_window_with_bump_tracks_plain_diagonal(self):
        # w(y) = S(y) h(y / H^(eps/4)) differs from the plain cut sum only
        # through tail terms; the gap stays a small multiple of H^(2/3 - eps/6)
        h, eps = 200.5, 0.008
        scale = h ** (eps / 4.0)

        def window(y):
            return np.sin(np.pi * y) / (np.pi * y) * bump_c4(y / scale)

        windowed = windowed_diagonal_sum(h, eps, window)
        plain = diagonal_sum(DiagonalParams(H=h, eps=eps, complete_tail=False))
        assert abs(windowed - plain) <= 5.0 * h ** (2.0 / 3.0 - eps / 6.0)

    def test_gaussian_window_matches_moment_prediction(self):
        # |w|^2 = exp(-y^2); complete the b-tail with the theta-function
        # value sum_n exp(-(n t)^2) = (sqrt(pi)/2)/t - 1/2 + O(exp(-pi^2/t^2))
        h, eps = 10000.5, 0.005
        windowed = windowed_diagonal_sum(h, eps, lambda y: np.exp(-0.5 * y * y))
        cut = int(h ** (2.0 / 3.0 + eps))
        bs = squarefree_values(cut).astype(np.float64)
        zc = zeta_constants()
        tail32 = zc.theta1 - float(np.sum(bs**-1.5))
        tail3 = zc.z3 / zeta_real(6.0) - float(np.sum(bs**-3.0))
        completed = windowed + math.sqrt(math.pi) * h * tail32 - h * h * tail3
        moment = float(mpmath.quad(lambda y: mpmath.exp(-(y**2)) * y ** mpmath.mpf("1/3"), [0, mpmath.inf]))
        predicted = 4.0 * zc.z43 / (3.0 * zc.z2) * moment * h ** (2.0 / 3.0)
        assert abs(completed / predicted - 1.0) <= 0.05

    def test_scalar_window_accepted(self):
        def scalar_window(y):
            if isinstance(y, np.ndarray):
                raise TypeError("scalar only")
            return math.exp(-abs(y))

        got = windowed_diagonal_sum(30.5, 0.005, scalar_window)
        vec = windowed_diagonal_sum(30.5, 0.005, lambda y: np.exp(-np.abs(y)))
        assert got == pytest.approx(vec, rel=1e-12)


class TestBump:
    def test_plateau_and_support(self):
        assert bump_c4(0.0) == 1.0
        assert bump_c4(-1.0) == 1.0
        assert bump_c4(2.0) == 0.0
        assert bump_c4(5.0) == 0.0
        assert 0.0 < bump_c4(1.5) < 1.0

    def test_documented_derivative_bounds(self):
        poly = np.polynomial.Polynomial([0, 0, 0, 0, 0, 126, -420, 540, -315, 70])
        u = np.linspace(0.0, 1.0, 400001)
        bounds = (2.461, 9.372, 78.76, 622.6)
        d = poly
        for k in range(4):
            d = d.deriv()
            assert float(np.max(np.abs(d(u)))) <= bounds[k]

    def test_c4_junctions(self):
        # h and its first four derivatives continue across |x| = 1, 2: the
        # one-sided 4th differences from both sides agree to O(delta * h^(5)),
        # with sup |h^(5)| = 15120; a C^3-only junction would differ by O(1/delta)
        for x0 in (1.0, 2.0):
            delta = 1e-3
            left = [float(bump_c4(x0 - k * delta)) for k in range(5)]
            right = [float(bump_c4(x0 + k * delta)) for k in range(5)]
            d4_left = sum((-1) ** k * math.comb(4, k) * left[k] for k in range(5)) / delta**4
            d4_right = sum((-1) ** k * math.comb(4, k) * right[k] for k in range(5)) / delta**4
            assert abs(d4_left - d4_right) < 3.0 * 15120 * delta
