"""Uniform-expansion layer: exact coefficient identities and fit-vs-symbolic checks."""

from __future__ import annotations

from fractions import Fraction

import pytest
from mpmath import mp

from zetacap.asympt import (
    a_tilde,
    a_tilde_at_zero,
    bernoulli_cumulant,
    coefficients_by_extraction,
    cumulant_values,
    curly_a_list,
    eval_sigma_s_poly,
    geometry_point,
    limit_cumulants_s,
    log_p_uniform,
    mu_series_g,
    poly_sigma_s_str,
)
from zetacap.errors import BasisOverflow
from zetacap.specfun import Precision, log_ferrers_w2


def close(x, y, tol):
    with mp.workdps(60):
        return abs(mp.mpf(x) - mp.mpf(y)) <= mp.mpf(tol)


# frozen closed-form targets for the u -> 0 coefficients, written as
# {(sigma2 power, S power): Fraction}
A1_LIMIT = {(0, 0): Fraction(-1, 12), (0, 1): Fraction(1, 4), (1, 1): Fraction(-1)}
A2_LIMIT = {
    (0, 1): Fraction(-1, 4), (1, 1): Fraction(1),
    (0, 2): Fraction(1, 4), (1, 2): Fraction(-1),
}
A3_LIMIT = {
    (0, 0): Fraction(1, 360),
    (0, 1): Fraction(1, 4), (1, 1): Fraction(-1),
    (0, 2): Fraction(-25, 32), (1, 2): Fraction(13, 4), (2, 2): Fraction(-1, 2),
    (0, 3): Fraction(25, 48), (1, 3): Fraction(-13, 6), (2, 3): Fraction(1, 3),
}
A4_LIMIT = {
    (0, 1): Fraction(-1, 4), (1, 1): Fraction(1),
    (0, 2): Fraction(15, 8), (1, 2): Fraction(-8), (2, 2): Fraction(2),
    (0, 3): Fraction(-13, 4), (1, 3): Fraction(14), (2, 3): Fraction(-4),
    (0, 4): Fraction(13, 8), (1, 4): Fraction(-7), (2, 4): Fraction(2),
}


def test_geometry_point_phase():
    with mp.workdps(50):
        th = mp.mpf(2) * mp.pi / 5
        # u -> 0: tau - ln u tends to 1 + ln tan(theta0/2)
        gp0 = geometry_point(0, th)
        assert close(gp0.tau_minus_log_u, 1 + mp.log(mp.tan(th / 2)), 1e-45)
        assert gp0.tau == mp.ninf
        assert close(gp0.nu, mp.cos(th), 1e-45)
        # u -> infinity: tau ~ u * theta0
        gp = geometry_point(mp.mpf(10) ** 5, th)
        assert close(gp.tau, mp.mpf(10) ** 5 * th, 1e-4)
        # continuity of the arccot branch through theta0 = pi/2 (nu = 0)
        u = mp.mpf("1.3")
        tp = geometry_point(u, mp.pi / 2 + mp.mpf("1e-9")).tau
        tm = geometry_point(u, mp.pi / 2 - mp.mpf("1e-9")).tau
        assert close(tp, tm, 1e-8)


def test_curly_a1_closed_form():
    with mp.workdps(50):
        u, s2 = mp.mpf("0.8"), mp.mpf("1.7")
        a1 = curly_a_list(u, s2, 1)[0]
        for nu in (mp.mpf("0.3"), mp.mpf("-0.4"), mp.mpf("0.95")):
            want = -(u**2) / (8 * (1 + u**2)) * (
                5 * (nu**3 - 1) / 3 + (1 / u**2 - 1) * (nu - 1)
            ) + s2 / (2 * u) * (mp.atan(u * nu) - mp.atan(u))
            assert close(a1.eval(nu), want, 1e-42), nu


def test_curly_a_vanishes_at_one():
    with mp.workdps(50):
        for series in curly_a_list(mp.mpf("1.4"), mp.mpf("0.9"), 2):
            assert close(series.eval(mp.mpf(1)), 0, 1e-42)


def test_basis_overflow_at_third_order():
    with pytest.raises(BasisOverflow):
        curly_a_list(1.0, 1.0, 3)


def test_bernoulli_cumulants():
    assert bernoulli_cumulant(1) == Fraction(-1, 12)
    assert bernoulli_cumulant(2) == 0
    assert bernoulli_cumulant(3) == Fraction(1, 360)
    assert bernoulli_cumulant(4) == 0
    assert bernoulli_cumulant(5) == Fraction(-1, 1260)


def test_limit_cumulants_match_closed_forms():
    got = limit_cumulants_s(4)
    assert got[0] == A1_LIMIT
    assert got[1] == A2_LIMIT
    assert got[2] == A3_LIMIT
    assert got[3] == A4_LIMIT


def test_limit_cumulants_match_hypergeometric_route():
    # independent derivation: a_n(0) = C_n + g_n with g_n from the 1/mu
    # expansion of ln 2F1(1/2-sigma, 1/2+sigma; mu+1; S)
    n_max = 6
    gs = mu_series_g(n_max)
    limits = limit_cumulants_s(n_max)
    for n in range(1, n_max + 1):
        want = dict(gs[n - 1])
        c = bernoulli_cumulant(n)
        if c:
            want[(0, 0)] = want.get((0, 0), Fraction(0)) + c
            if not want[(0, 0)]:
                del want[(0, 0)]
        assert limits[n - 1] == want, n


def test_cumulants_continuous_at_zero_u():
    with mp.workdps(50):
        th, s2 = mp.mpf("1.1"), mp.mpf("1.3")
        tiny = mp.mpf("1e-6")
        sym = cumulant_values(tiny, th, s2, 2)
        for n in (1, 2):
            want = a_tilde_at_zero(n, th, s2)
            assert close(sym[n - 1], want, 1e-9), n


def test_extraction_recovers_symbolic_a2():
    # fit a_2..a_7 from exact ln P samples and compare the a_2 cell against
    # the symbolic recurrence value; this ties together tau, t, a_1 and the
    # Ferrers evaluators end to end
    with mp.workdps(50):
        th = mp.mpf("2.2")
        s2 = mp.mpf("1.7")
        u = mp.mpf("0.7")
        fit = coefficients_by_extraction(u, th, s2, n_lo=2, n_hi=7)
        sym = cumulant_values(u, th, s2, 2)[1]
        assert close(fit[2], sym, 1e-7)


def test_extraction_cache_determinism():
    a = coefficients_by_extraction(0.7, 2.2, 1.7, n_lo=3, n_hi=8)
    b = coefficients_by_extraction(0.7, 2.2, 1.7, n_lo=3, n_hi=8)
    assert a == b


def test_log_p_uniform_zero_u_branch():
    with mp.workdps(50):
        th, s2 = mp.mpf("1.1"), mp.mpf("1.3")
        prec = Precision(50, 1e-40)
        for mu, tol in ((mp.mpf(100), 1e-7), (mp.mpf(200), 1e-8)):
            exact = log_ferrers_w2(mu, s2, th, prec)
            u4 = log_p_uniform(mu, 0, th, s2, 4, prec)
            assert close(u4, exact, tol)
        # adding orders must help by a large factor
        mu = mp.mpf(200)
        exact = log_ferrers_w2(mu, s2, th, prec)
        e2 = abs(log_p_uniform(mu, 0, th, s2, 2, prec) - exact)
        e4 = abs(log_p_uniform(mu, 0, th, s2, 4, prec) - exact)
        assert e4 < e2 / 1000


def test_log_p_uniform_generic_u():
    with mp.workdps(50):
        th = mp.mpf(2) * mp.pi / 5
        s2 = mp.mpf("1.69")
        u = mp.mpf("0.7")
        prec = Precision(50, 1e-40)
        mu = mp.mpf(40)
        exact = log_ferrers_w2(mu, s2 - (u * mu) ** 2, th, prec)
        e2 = abs(log_p_uniform(mu, u, th, s2, 2, prec) - exact)
        e4 = abs(log_p_uniform(mu, u, th, s2, 4, prec) - exact)
        assert e4 < 1e-6
        assert e4 < e2 / 50


def test_a_tilde_profile():
    with mp.workdps(50):
        th, s2 = mp.mpf("1.1"), mp.mpf("1.3")
        # v -> 0 continuity of the profile used by the nonlocal integrals
        v = mp.mpf("1e-8")
        assert close(a_tilde(1, v, th, s2), a_tilde_at_zero(1, th, s2), 1e-7)
        # exact polynomial evaluation agrees with the direct formula
        s_val = mp.sin(th / 2) ** 2
        want = -mp.mpf(1) / 12 + (1 - 4 * s2) * s_val / 4
        assert close(a_tilde_at_zero(1, th, s2), want, 1e-44)


def test_poly_rendering_deterministic():
    s = poly_sigma_s_str(limit_cumulants_s(1)[0])
    assert s == "(-1/12) + (1/4)*S + (-1)*sigma2*S"
    assert poly_sigma_s_str({}) == "0"
    with mp.workdps(40):
        val = eval_sigma_s_poly(A1_LIMIT, mp.mpf("0.25"), mp.mpf("0.3"))
        assert close(val, -mp.mpf(1) / 12 + mp.mpf("0.3") / 4 - mp.mpf("0.25") * mp.mpf("0.3"), 1e-35)
