"""Tests for the spectral oracles: roots, direct sums, and cross-checks."""

import pytest
from mpmath import mp

from zetacap.errors import (
    BracketFailure,
    DomainError,
    QuadratureFailure,
    SingularDeterminant,
    TailBoundTooLarge,
)
from zetacap.invariants import zeta_prime0_general
from zetacap.oracle import (
    _char_series,
    char_value,
    eigen_roots,
    root_table,
    zeta_contour,
    zeta_direct,
    zeta_prime0_subtraction,
)
from zetacap.specfun import CapGeometry, Precision

PREC = Precision(30, 1e-20)


@pytest.fixture(autouse=True)
def _high_dps():
    with mp.workdps(40):
        yield


def hemisphere():
    return CapGeometry(2, mp.pi / 2, mp.mpf("0.5"))


def geom_narrow():
    # S = sin^2(theta0/2) < 1/2 exercises the boosted upward recurrence
    return CapGeometry(2, 2 * mp.pi / 5, mp.mpf("1.3"))


def geom_wide():
    # S > 1/2 exercises the plain upward recurrence
    return CapGeometry(2, mp.mpf("2.2"), mp.mpf("1.3"))


def lattice_zeta(s):
    """Hemisphere d=2, sigma=1/2: roots w = k+2+2j with weight w(w-1)/2."""
    return mp.nsum(
        lambda w: (w * (w - 1) / 2) * (w * w - mp.mpf("0.25")) ** (-s),
        [2, mp.inf])


class TestCharValue:
    def test_ladder_matches_series_both_regimes(self):
        for geom in (geom_wide(), geom_narrow()):
            for k in (0, 3, 11, 40):
                mu = mp.mpf(2 * k + 1) / 2
                for w in (mp.mpf("0.37"), mp.mpf("3.7"), mp.mpf("17.31")):
                    a = char_value(geom, k, w, PREC)
                    b = _char_series(mu, w, geom.theta0, geom.s_half, 30)
                    assert abs(a - b) <= mp.mpf("1e-20") * max(abs(b), mp.mpf("1e-30"))

    def test_near_integer_degree_hazard(self):
        # an integer w below the ladder top degenerates the upward
        # recurrence; the guarded series must take over seamlessly
        geom = geom_wide()
        for w in (mp.mpf("4.0000003"), mp.mpf(4) + mp.mpf("1e-9")):
            a = char_value(geom, 11, w, PREC)
            b = _char_series(mp.mpf(23) / 2, w, geom.theta0, geom.s_half, 30)
            assert abs(a - b) <= mp.mpf("1e-20") * abs(b)

    def test_elementary_orders(self):
        # k=0, d=2 has mu=1/2: the characteristic value is a pure sine,
        # so it must vanish at w = n pi/theta0 exactly
        geom = geom_narrow()
        v = char_value(geom, 0, mp.mpf("2.5"), PREC)
        assert abs(v) < mp.mpf("1e-35")

    def test_rejects_negative_k(self):
        with pytest.raises(DomainError):
            char_value(hemisphere(), -1, mp.mpf(3), PREC)


class TestEigenRoots:
    def test_hemisphere_lattice(self):
        hemi = hemisphere()
        for k, first in ((0, 2), (2, 4), (5, 7)):
            roots = eigen_roots(hemi, k, 3, PREC)
            for j, r in enumerate(roots):
                assert abs(r.omega - (first + 2 * j)) < mp.mpf("1e-12")
                assert abs(r.alpha2 - (r.omega ** 2 - mp.mpf("0.25"))) < mp.mpf("1e-25")
                assert r.k == k and r.n == j

    def test_bracket_encloses_root(self):
        for r in eigen_roots(geom_narrow(), 3, 4, PREC):
            lo, hi = r.bracket
            assert lo <= r.omega <= hi

    def test_residual_small_against_slope(self):
        geom = geom_narrow()
        h = mp.mpf("1e-6")
        for r in eigen_roots(geom, 2, 3, PREC):
            f0 = char_value(geom, 2, r.omega, PREC)
            slope = (char_value(geom, 2, r.omega + h, PREC)
                     - char_value(geom, 2, r.omega - h, PREC)) / (2 * h)
            assert abs(f0) <= mp.mpf("1e-10") * abs(slope)

    def test_interlacing_in_k(self):
        geom = geom_narrow()
        cols = [eigen_roots(geom, k, 4, PREC) for k in range(4)]
        for k in range(3):
            for n in range(4):
                assert cols[k][n].omega < cols[k + 1][n].omega
            for n in range(3):
                assert cols[k + 1][n].omega < cols[k][n + 1].omega

    def test_first_root_lower_bounds(self):
        for geom in (geom_narrow(), geom_wide(), CapGeometry(3, mp.mpf("1.1"), mp.mpf("1.2"))):
            for k in (0, 1, 5):
                mu = mp.mpf(2 * k + geom.d - 1) / 2
                w1 = eigen_roots(geom, k, 1, PREC)[0].omega
                assert w1 > mu + mp.mpf("0.5")
                if geom.theta0 <= mp.pi / 2:
                    assert w1 > mu / mp.sin(geom.theta0)

    def test_root_table_ordering(self):
        rows = root_table(geom_narrow(), 2, 3, PREC)
        assert [(r.k, r.n) for r in rows] == [
            (k, n) for k in range(3) for n in range(3)]

    def test_empty_request(self):
        assert eigen_roots(hemisphere(), 0, 0, PREC) == []


class TestZetaDirect:
    def test_hemisphere_against_lattice(self):
        hemi = hemisphere()
        for s in (mp.mpf(3), mp.mpf("2.6")):
            res = zeta_direct(hemi, s, truncation=(60, 40), prec=PREC)
            exact = lattice_zeta(s)
            assert abs(res.value - exact) <= res.tail_bound
            assert res.tail_bound <= mp.mpf("1e-3") * abs(res.value)

    def test_monotone_in_s(self):
        # every eigenvalue exceeds 1 here, so zeta(s) decreases in s
        hemi = hemisphere()
        vals = [zeta_direct(hemi, mp.mpf(s), truncation=(25, 20), prec=PREC).value
                for s in ("3.0", "3.5", "4.0")]
        assert vals[0] > vals[1] > vals[2]

    def test_sigma2_derivative_identity(self):
        # d zeta(s)/d sigma^2 = s zeta(s+1); truncation errors correlate
        # across the finite difference, so the identity is tight
        h = mp.mpf("1e-5")
        s = mp.mpf(3)
        sig2 = mp.mpf("0.25")
        up = CapGeometry(2, mp.pi / 2, mp.sqrt(sig2 + h))
        dn = CapGeometry(2, mp.pi / 2, mp.sqrt(sig2 - h))
        fd = (zeta_direct(up, s, truncation=(30, 25), prec=PREC).value
              - zeta_direct(dn, s, truncation=(30, 25), prec=PREC).value) / (2 * h)
        ref = s * zeta_direct(hemisphere(), s + 1, truncation=(30, 25), prec=PREC).value
        assert abs(fd - ref) <= mp.mpf("1e-5") * abs(ref)

    def test_singular_determinant(self):
        with pytest.raises(SingularDeterminant):
            zeta_direct(CapGeometry(2, mp.pi / 2, mp.mpf("2.5")), mp.mpf(3),
                        truncation=(5, 5), prec=PREC)

    def test_domain_guard(self):
        with pytest.raises(DomainError):
            zeta_direct(hemisphere(), mp.mpf("1.5"), truncation=(5, 5), prec=PREC)

    def test_tail_bound_too_large(self):
        with pytest.raises(TailBoundTooLarge):
            zeta_direct(hemisphere(), mp.mpf(3), truncation=(3, 3), prec=PREC,
                        rel_tol=mp.mpf("1e-8"))


class TestZetaContour:
    def test_hemisphere_exact(self):
        zc = zeta_contour(hemisphere(), 3, PREC)
        assert abs(zc - lattice_zeta(mp.mpf(3))) <= mp.mpf("1e-8") * zc

    def test_slow_decay_at_s2(self):
        zc = zeta_contour(hemisphere(), 2, PREC, rel_tol=mp.mpf("1e-5"))
        assert abs(zc - lattice_zeta(mp.mpf(2))) <= mp.mpf("1e-5") * zc

    def test_integer_order_required(self):
        with pytest.raises(DomainError):
            zeta_contour(hemisphere(), 1, PREC)
        with pytest.raises(DomainError):
            zeta_contour(hemisphere(), mp.mpf("2.5"), PREC)

    def test_no_fit_window_raises(self):
        with pytest.raises(QuadratureFailure):
            zeta_contour(hemisphere(), 3, PREC, k_cap=13)

    def test_unreachable_tolerance_raises(self):
        with pytest.raises(TailBoundTooLarge):
            zeta_contour(hemisphere(), 3, PREC, k_cap=24, rel_tol=mp.mpf("1e-12"))

    def test_cross_method_generic_point(self):
        geom = geom_narrow()
        zc = zeta_contour(geom, 3, PREC)
        ds = zeta_direct(geom, mp.mpf(3), truncation=(60, 40), prec=PREC)
        assert abs(ds.value - zc) <= ds.tail_bound + mp.mpf("1e-8") * abs(zc)

    def test_cross_method_d3(self):
        geom = CapGeometry(3, mp.mpf("1.1"), mp.mpf("1.2"))
        zc = zeta_contour(geom, 3, PREC, rel_tol=mp.mpf("3e-5"))
        ds = zeta_direct(geom, mp.mpf(3), truncation=(30, 25), prec=PREC)
        assert abs(ds.value - zc) <= ds.tail_bound + mp.mpf("1e-4") * abs(zc)


class TestSubtractionRoute:
    def test_hemisphere_closed_form(self):
        # brute lattice value of zeta'(0) on the conformal hemisphere
        brute = (mp.zeta(-2, derivative=1) - mp.zeta(-1, derivative=1)
                 - mp.mpf(1) / 16 - mp.euler / 8
                 + mp.nsum(lambda m: (mp.zeta(2 * m - 2) - mp.zeta(2 * m - 1))
                           / (2 * m * 4 ** m), [2, mp.inf]))
        val = zeta_prime0_subtraction(hemisphere(), PREC)
        assert abs(val - brute) < mp.mpf("1e-18")

    def test_matches_assembled_route(self):
        geom = geom_narrow()
        sub = zeta_prime0_subtraction(geom, PREC)
        gen = zeta_prime0_general(2, mp.mpf("1.3"), 2 * mp.pi / 5, PREC)
        assert abs(sub - gen) <= mp.mpf("1e-12") * abs(gen)

    def test_wide_cap_matches_assembled_route(self):
        sub = zeta_prime0_subtraction(geom_wide(), PREC)
        gen = zeta_prime0_general(2, mp.mpf("1.3"), mp.mpf("2.2"), PREC)
        assert abs(sub - gen) <= mp.mpf("1e-12") * abs(gen)
