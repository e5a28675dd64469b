"""Continuation layer: lemma, side function, partie finie, Abel-Plana, NL."""

from __future__ import annotations

from fractions import Fraction

import pytest
from mpmath import mp

from zetacap.asympt import a_tilde, a_tilde_at_zero, mu_series_g, eval_sigma_s_poly
from zetacap.continuation import (
    AsymptoticDescriptor,
    abel_plana_of,
    abel_plana_tail,
    curly_g_p,
    g_p_zero,
    g_r_zero,
    lemma_continue,
    nonlocal_integral,
    pf_integral_phi,
    pf_lambda0,
    phi_hat,
    phi_hat_derivs,
    phi_hat_taylor,
    phi_of_x,
    pole_balance_polys,
    _check_top_coefficient,
)
from zetacap.errors import DescriptorMismatch, DifferentiationUnstable, DomainError
from zetacap.specfun import CapGeometry, Precision

PREC = Precision(40, 1e-30)


@pytest.fixture(autouse=True)
def _high_dps():
    with mp.workdps(50):
        yield


def geom2():
    return CapGeometry(2, 2 * mp.pi / 5, mp.mpf("1.3"))


def geom3():
    return CapGeometry(3, mp.mpf("2.2"), mp.mpf("0.8"))


class TestLemma:
    def test_pure_log(self):
        desc = AsymptoticDescriptor(((0, 1, 1),))
        pole, fin = lemma_continue(lambda x: mp.log(x), desc, 1, PREC)
        assert pole == 1
        assert abs(fin) < 1e-35

    def test_power_three_halves(self):
        desc = AsymptoticDescriptor(((Fraction(3, 2), 0, 1),))
        pole, fin = lemma_continue(lambda x: x ** mp.mpf(1.5), desc, 1, PREC)
        assert pole == 0
        assert abs(fin + 1) < 1e-35

    def test_x_log_x(self):
        desc = AsymptoticDescriptor(((1, 1, 1),))
        pole, fin = lemma_continue(lambda x: x * mp.log(x), desc, 2, PREC)
        assert pole == 0
        assert abs(fin + 2 * mp.log(2)) < 1e-35

    def test_log_plus_decay(self):
        desc = AsymptoticDescriptor(((0, 1, 1),))
        pole, fin = lemma_continue(lambda x: mp.log(x) + 1 / (1 + x), desc, 1, PREC)
        assert pole == 1
        assert abs(fin + mp.mpf(1) / 2) < 1e-35

    def test_growing_power_bookkeeping(self):
        desc = AsymptoticDescriptor(((2, 0, 1), (0, 0, 5)))
        pole, fin = lemma_continue(lambda x: x * x + 5, desc, 2, PREC)
        assert pole == 0
        assert abs(fin + 4) < 1e-35

    def test_mismatch_detected(self):
        desc = AsymptoticDescriptor(((0, 0, 1),))
        with pytest.raises(DescriptorMismatch):
            lemma_continue(lambda x: mp.log(x), desc, 1, PREC)

    def test_rejects_higher_log_power(self):
        with pytest.raises(DomainError):
            AsymptoticDescriptor(((0, 2, 1),))


class TestSideFunction:
    def test_conformal_mass_kills_phi(self):
        g = CapGeometry(2, mp.mpf("1.1"), mp.mpf(1) / 2)
        assert phi_of_x(g, 0, PREC) == 0
        assert phi_of_x(g, mp.mpf("3.7"), PREC) == 0

    def test_phi_at_zero_is_single_log(self):
        g = geom2()
        # d(0) = 1, so phi(0) = ln 2F1(1/2-sigma, 1/2+sigma; (d+1)/2; S)
        from zetacap.specfun import gauss_2f1

        want = mp.log(gauss_2f1(mp.mpf(1) / 2 - g.sigma, mp.mpf(1) / 2 + g.sigma,
                                mp.mpf(3) / 2, g.s_half, PREC))
        assert abs(phi_of_x(g, 0, PREC) - want) < 1e-35

    def test_phi_hat_matches_phi(self):
        g = geom3()
        x = mp.mpf("2.4")
        mu = x + (g.d - 1) / mp.mpf(2)
        y = 1 / mu
        lhs = phi_hat(g, y, PREC)
        rhs = y**g.d * phi_of_x(g, x, PREC)
        assert abs(lhs - rhs) < 1e-35

    def test_phi_hat_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            phi_hat(geom2(), -0.25, PREC)

    def test_jet_remainder_scaling(self):
        # After removing the exact jet through y^(d+3), the remainder drops
        # like y^(d+4): halving y must shrink it by roughly 2^(d+4).
        g = geom3()
        cs = phi_hat_taylor(g, g.d + 3, PREC)

        def rem(y):
            return phi_hat(g, y, PREC) - mp.fsum(cs[j] * y**j for j in range(len(cs)))

        r1, r2 = rem(mp.mpf("0.02")), rem(mp.mpf("0.01"))
        ratio = abs(r1 / r2)
        assert 2 ** (g.d + 3) < ratio < 2 ** (g.d + 6)

    def test_cauchy_derivatives_match_finite_differences(self):
        g = geom2()
        x0 = mp.mpf("0.7")
        got = phi_hat_derivs(g, x0, 4, PREC)
        with mp.workdps(55):
            h = mp.mpf("1e-6")
            f = lambda t: phi_hat(g, t, PREC)
            want4 = (f(x0 - 2 * h) - 4 * f(x0 - h) + 6 * f(x0)
                     - 4 * f(x0 + h) + f(x0 + 2 * h)) / h**4
            want1 = (f(x0 + h) - f(x0 - h)) / (2 * h)
        assert abs(got[4] - want4) < 1e-8 * (1 + abs(want4))
        assert abs(got[1] - want1) < 1e-10


class TestPartieFinie:
    def test_cutoff_independence(self):
        for g in (geom2(), geom3()):
            vals = [pf_integral_phi(g, PREC, xi)[0] for xi in (Fraction(1, 2), 1, 2)]
            assert abs(vals[0] - vals[1]) < 1e-25
            assert abs(vals[2] - vals[1]) < 1e-25

    def test_pole_coefficient_exact_balance(self):
        for d in range(2, 7):
            lhs, rhs = pole_balance_polys(d)
            assert {k: v for k, v in lhs.items() if v} == {k: v for k, v in rhs.items() if v}

    def test_corrupted_jet_is_caught(self):
        g = geom2()
        cs = phi_hat_taylor(g, g.d + 1, PREC)
        bad = list(cs)
        bad[g.d + 1] = bad[g.d + 1] * 2 + 1
        with pytest.raises(DifferentiationUnstable):
            _check_top_coefficient(g, bad, PREC)

    def test_conformal_mass_gives_zero(self):
        g = CapGeometry(3, mp.mpf("0.9"), mp.mpf(1) / 2)
        pf, pole = pf_integral_phi(g, PREC)
        assert abs(pf) < 1e-30
        assert abs(pole) < 1e-40


class TestAbelPlana:
    def test_conformal_mass_gives_zero(self):
        g = CapGeometry(2, mp.mpf("1.4"), mp.mpf(1) / 2)
        assert abel_plana_tail(g, PREC) == 0

    def test_summation_identity(self):
        # Abel-Plana closes the gap between the half-line sum and integral of
        # the tail-subtracted side function: sum psi(k) = psi(0)/2 +
        # int_0^inf psi + AP(psi). Truncation at k = 150 leaves O(150^-4).
        g = geom2()
        s2 = g.sigma**2
        s_val = g.s_half
        gs = mu_series_g(6)
        g_vals = [eval_sigma_s_poly(p, s2, s_val, PREC) for p in gs]

        def psi(z):
            mu = z + mp.mpf(1) / 2
            tail = 2 * mu * mp.fsum(g_vals[m - 1] * mu ** (-m) for m in range(1, 7))
            return phi_of_x(g, z, PREC) - tail

        ksum = mp.fsum(psi(k) for k in range(151))
        integral = mp.quad(psi, [0, 5, 20, 150], method="gauss-legendre")
        ap = abel_plana_of(psi, PREC, upper=30)
        gap = ksum - integral - psi(0) / 2 - ap
        assert abs(gap) < 1e-6


class TestNonlocal:
    def test_split_point_invariance(self):
        # Independent regularization with split at V: NL = -ln V * a(0)
        # - int_0^V (a - a0)/v - int_V^inf a/v. Compare V = 4 against V = 1.
        g = geom2()
        n = 2
        th, s2 = g.theta0, g.sigma**2
        a0 = a_tilde_at_zero(n, th, s2, PREC)
        v_split = mp.mpf(4)

        def head(x):  # v = x^2 on (0, V)
            return 2 * (a_tilde(n, x * x, th, s2, PREC) - a0) / x

        def tail(z):  # v = V / z^2 on (V, inf)
            return 2 * a_tilde(n, v_split / (z * z), th, s2, PREC) / z

        alt = (-mp.log(v_split) * a0
               - mp.quad(head, [0, mp.sqrt(v_split)], method="gauss-legendre")
               - mp.quad(tail, [0, 1], method="gauss-legendre"))
        assert abs(alt - nonlocal_integral(n, g, PREC)) < 1e-9

    def test_profile_decays_at_infinity(self):
        g = geom2()
        big = a_tilde(2, mp.mpf("1e6"), g.theta0, g.sigma**2, PREC)
        mid = a_tilde(2, mp.mpf("1e4"), g.theta0, g.sigma**2, PREC)
        assert abs(big) < abs(mid) < mp.mpf("0.1")


class TestAssembledParts:
    def test_phase_value_continuity_at_origin(self):
        g = geom2()
        v0 = g_p_zero(g, PREC)
        v_eps = curly_g_p(g, mp.mpf("1e-6"), PREC)
        assert abs(v0 - v_eps) < 1e-8

    def test_pf_lambda0_against_direct_zeta_combination(self):
        # Independent route: base sums written directly with mpmath's Hurwitz
        # zeta and its s-derivative. d = 2: the level sum starts at k = 0 with
        # mu = k + 1/2 and d(k) = 2 mu, so zeta_N(s) = 2 zeta_H(2s-1, 1/2);
        # the cumulative tower has e(m) = (m+1)^2 at offset m + 3/2.
        with mp.workdps(60):
            zN = lambda s: 2 * mp.zeta(2 * s - 1, mp.mpf(1) / 2)
            dzN = lambda s: 4 * mp.zeta(2 * s - 1, mp.mpf(1) / 2, 1)
            d_next = (mp.zeta(-2, mp.mpf(3) / 2, 1) - mp.zeta(-1, mp.mpf(3) / 2, 1)
                      + mp.zeta(0, mp.mpf(3) / 2, 1) / 4)
            ch_sum = mp.mpf(0)  # only the n = 2 pole exists at d = 2 and C_2 = 0
            want = d_next + dzN(0) / 4 + dzN(mp.mpf(-1) / 2) / 2 + zN(mp.mpf(-1) / 2) + 2 * ch_sum
        got = pf_lambda0(2, PREC)
        assert abs(got - want) < 1e-30

    def test_g_r_zero_conformal_closed_form(self):
        # At sigma = 1/2 every side-function piece vanishes, so the value
        # collapses to exact base-tower data.
        g = CapGeometry(2, mp.mpf("1.2"), mp.mpf(1) / 2)
        with mp.workdps(60):
            d_next = (mp.zeta(-2, mp.mpf(3) / 2, 1) - mp.zeta(-1, mp.mpf(3) / 2, 1)
                      + mp.zeta(0, mp.mpf(3) / 2, 1) / 4)
            want = (mp.mpf(0) * mp.log(mp.tan(g.theta0 / 2))  # zeta_N(-1/2) = 0 at d=2
                    - mp.mpf(1) / 24 / 2 * mp.log(2 * mp.pi) * (-2)  # -(1/2) zeta_N(0) ln 2pi
                    - d_next)
            # zeta_N(0) = 1/12 at d = 2
            want = -mp.mpf(1) / 12 / 2 * mp.log(2 * mp.pi) - d_next
        got = g_r_zero(g, PREC)
        assert abs(got - want) < 1e-30
