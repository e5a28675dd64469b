"""Assembled spectral invariants: zeta(0), zeta'(0), and the determinant.

zeta(0) is an exact polynomial in (sigma^2, sin^2(theta0/2)): the base
special values supply the constant cell and each base-zeta pole couples to
the u -> 0 limit of the matching uniform-expansion cumulant.  zeta'(0)
assembles the continuation data into an additive term ledger:

    zeta'(0) = -[(1/2) zeta_N(0) + zeta_N(-1/2)] ln sin(theta0)
               + zeta_N(-1/2) ln(1 + cos(theta0)) + zeta'_{N+1}(0)
               + 2 sum_n C_n H_{n-1} Res_n  -  sum_n Res_n NL_n
               - (1/2) phi(0) - AP[phi] - PF int_0^inf phi dx

The determinant follows the effective-action convention
Gamma = -(1/2) zeta'(0) - (1/2) zeta(0) ln(mu_scale^2), ln det = 2 Gamma.

The widely quoted per-dimension closed forms for D = 3, 4, 5 are kept as
*literal transcriptions* (zeta0_printed / zeta_prime0_printed).  Where they
deviate from the general assembly the difference is quantified by
discrepancy_report, never reconciled in code: the D = 5 zeta(0) polynomial
carries a (1/192)(1 - 4 sigma^2)(S - S^2) defect, and the derivative
transcriptions regroup scheme constants into theta0-dependent logarithms
(see the candidate shifts in the report).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp

from .asympt import (
    bernoulli_cumulant,
    eval_sigma_s_poly,
    limit_cumulants_s,
    poly_sigma_s_str,
    _pns_add,
    _pns_scale,
)
from .basezeta import (
    base_zeta_exact,
    base_zeta_residue,
    harmonic_cumulant_residue_sum,
    next_zeta_deriv0,
)
from .continuation import (
    abel_plana_tail,
    g_r_reg,
    g_r_zero,
    nonlocal_integral,
    pf_integral_phi,
    phi_hat,
    phi_hat_taylor,
    phi_of_x,
)
from .errors import DomainError, QuadratureFailure
from .specfun import (
    CapGeometry,
    Precision,
    _as_mpf,
    _resolve,
    harmonic_number,
    riemann_zeta_deriv_neg,
)

__all__ = [
    "ZetaInvariants",
    "zeta0_poly",
    "zeta0_general",
    "zeta0_printed",
    "zeta0_printed_poly",
    "zeta0_discrepancy_poly",
    "zeta_prime0_terms",
    "zeta_prime0_general",
    "zeta_prime0_printed",
    "log_weight_derivative_integral",
    "phi_hat_power_tail",
    "pf_compact_form",
    "logdet",
    "discrepancy_report",
]

PRINTED_DIMENSIONS = (3, 4, 5)


# ---------------------------------------------------------------------------
# zeta(0): exact polynomial and evaluations


_ZETA0_POLY_CACHE: dict[int, dict] = {}


def zeta0_poly(d: int) -> dict:
    """Exact (sigma^2, S) polynomial of zeta(0) for base dimension d.

    zeta(0) = -(1/4) zeta_N(0) - (1/2) zeta_N(-1/2) - sum_n Res_n a_n(u=0);
    keys are (sigma^2 power, S power) with Fraction values, S = sin^2(theta0/2).
    """
    if d not in _ZETA0_POLY_CACHE:
        const = -base_zeta_exact(d, Fraction(0)) / 4 - base_zeta_exact(d, Fraction(-1, 2)) / 2
        poly = {(0, 0): const} if const else {}
        limits = limit_cumulants_s(d)
        for n in range(1, d + 1):
            res = base_zeta_residue(d, n)
            if res:
                poly = _pns_add(poly, _pns_scale(limits[n - 1], -res))
        _ZETA0_POLY_CACHE[d] = {k: v for k, v in poly.items() if v}
    return dict(_ZETA0_POLY_CACHE[d])


def zeta0_general(d: int, sigma, theta0, prec: Precision | None = None):
    """zeta(0) from the master assembly, evaluated as an mpf."""
    prec = _resolve(prec)
    geom = CapGeometry(d, theta0, sigma)
    with mp.workdps(prec.working_digits + 10):
        return eval_sigma_s_poly(zeta0_poly(d), geom.sigma ** 2, geom.s_half, prec)


def _require_printed(D: int) -> int:
    if D not in PRINTED_DIMENSIONS:
        raise DomainError("printed closed forms cover D in %s, got D=%s"
                          % (PRINTED_DIMENSIONS, D))
    return D - 1


def zeta0_printed(D: int, sigma, theta0, prec: Precision | None = None):
    """Literal transcription of the quoted zeta(0) polynomial for D = 3, 4, 5.

    Kept verbatim even where it disagrees with zeta0_general (the D = 5 form
    does; see zeta0_discrepancy_poly).
    """
    d = _require_printed(D)
    prec = _resolve(prec)
    geom = CapGeometry(d, theta0, sigma)
    with mp.workdps(prec.working_digits + 10):
        s2 = geom.sigma ** 2
        s_val = geom.s_half
        f1 = -1 + 4 * s2
        if D == 3:
            return _as_mpf(Fraction(-1, 48)) - f1 * mp.sin(geom.theta0) ** 2 / 16
        if D == 4:
            f2 = -25 + 4 * s2
            return (_as_mpf(Fraction(-1, 180)) + f1 * s_val / 8
                    + f1 * f2 * s_val ** 2 / 64 - f1 * f2 * s_val ** 3 / 96)
        f3 = -59 + 16 * s2
        f4 = -13 + 4 * s2
        return (_as_mpf(Fraction(17, 11520))
                - _as_mpf(Fraction(7, 192)) * f1 * s_val
                - f1 * f3 * s_val ** 2 / 192
                + f1 * f4 * s_val ** 3 / 24
                - f1 * f4 * s_val ** 4 / 48)


_PRINTED_ZETA0_POLYS = {
    3: {(0, 0): Fraction(-1, 48),
        (0, 1): Fraction(1, 4), (1, 1): Fraction(-1),
        (0, 2): Fraction(-1, 4), (1, 2): Fraction(1)},
    4: {(0, 0): Fraction(-1, 180),
        (0, 1): Fraction(-1, 8), (1, 1): Fraction(1, 2),
        (0, 2): Fraction(25, 64), (1, 2): Fraction(-13, 8), (2, 2): Fraction(1, 4),
        (0, 3): Fraction(-25, 96), (1, 3): Fraction(13, 12), (2, 3): Fraction(-1, 6)},
    5: {(0, 0): Fraction(17, 11520),
        (0, 1): Fraction(7, 192), (1, 1): Fraction(-7, 48),
        (0, 2): Fraction(-59, 192), (1, 2): Fraction(21, 16), (2, 2): Fraction(-1, 3),
        (0, 3): Fraction(13, 24), (1, 3): Fraction(-7, 3), (2, 3): Fraction(2, 3),
        (0, 4): Fraction(-13, 48), (1, 4): Fraction(7, 6), (2, 4): Fraction(-1, 3)},
}


def zeta0_printed_poly(D: int) -> dict:
    """The quoted zeta(0) closed form as an exact (sigma^2, S) polynomial."""
    _require_printed(D)
    return dict(_PRINTED_ZETA0_POLYS[D])


def zeta0_discrepancy_poly(D: int) -> dict:
    """printed minus general, exactly; empty dict means the routes agree."""
    d = _require_printed(D)
    diff = _pns_add(zeta0_printed_poly(D), _pns_scale(zeta0_poly(d), Fraction(-1)))
    return {k: v for k, v in diff.items() if v}


# ---------------------------------------------------------------------------
# zeta'(0): master term ledger


def zeta_prime0_terms(d: int, sigma, theta0, prec: Precision | None = None) -> dict:
    """Every additive term of the zeta'(0) master formula, by name.

    Keys: log_sin, log_one_plus_cos, tower_derivative, harmonic_cumulant,
    nonlocal, half_phi_zero, abel_plana, partie_finie.  Their sum is the
    derivative at zero.
    """
    prec = _resolve(prec)
    geom = CapGeometry(d, theta0, sigma)
    with mp.workdps(prec.working_digits + 10):
        z0 = _as_mpf(base_zeta_exact(d, Fraction(0)))
        zh = _as_mpf(base_zeta_exact(d, Fraction(-1, 2)))
        terms = {
            "log_sin": -(z0 / 2 + zh) * mp.log(mp.sin(geom.theta0)),
            "log_one_plus_cos": zh * mp.log(1 + mp.cos(geom.theta0)),
            "tower_derivative": next_zeta_deriv0(d, prec),
            "harmonic_cumulant": 2 * _as_mpf(harmonic_cumulant_residue_sum(d)),
        }
        nl = mp.mpf(0)
        for n in range(1, d + 1):
            res = base_zeta_residue(d, n)
            if res:
                nl -= _as_mpf(res) * nonlocal_integral(n, geom, prec)
        terms["nonlocal"] = nl
        terms["half_phi_zero"] = -phi_of_x(geom, 0, prec) / 2
        terms["abel_plana"] = -abel_plana_tail(geom, prec)
        pf_val, _ = pf_integral_phi(geom, prec)
        terms["partie_finie"] = -pf_val
        return terms


def zeta_prime0_general(d: int, sigma, theta0, prec: Precision | None = None,
                        terms: dict | None = None, check_bridge: bool = False):
    """zeta'(0) from the master assembly; pass a precomputed term ledger to
    avoid re-running the quadratures.

    check_bridge recomputes the local part through the paired regularized
    generating functions (g_r_reg - g_r_zero) and raises ArithmeticError if
    the two assemblies drift apart; it roughly doubles the quadrature cost.
    """
    prec = _resolve(prec)
    if terms is None:
        terms = zeta_prime0_terms(d, sigma, theta0, prec)
    with mp.workdps(prec.working_digits + 10):
        total = mp.fsum(terms.values())
        if check_bridge:
            geom = CapGeometry(d, theta0, sigma)
            alt = g_r_reg(geom, prec) - g_r_zero(geom, prec) + terms["nonlocal"]
            tol = (1 + abs(total)) * mp.mpf(10) ** (5 - prec.working_digits)
            if abs(total - alt) > tol:
                raise ArithmeticError(
                    "zeta'(0) assemblies disagree: %s vs %s" % (mp.nstr(total), mp.nstr(alt)))
        return total


# ---------------------------------------------------------------------------
# the log-weighted derivative integral and the compact partie finie


def log_weight_derivative_integral(geom: CapGeometry, prec: Precision | None = None,
                                   xi=Fraction(1, 2)):
    """J = int_0^inf ln(x) phi_hat^(d+2)(x) dx, reduced by parts.

    With T the exact jet of order d+1 (whose top derivative is constant and
    whose lower ones are polynomials), m = d + 2 integrations by parts give

        J = -(d+1)! c_{d+1} ln(xi)
            + sum_{k=1}^{d+1} (k-1)! xi^{-k} T^(d+1-k)(xi)
            - (d+1)! [ int_0^xi (phi_hat - T) x^{-d-2} dx
                       + int_xi^inf phi_hat x^{-d-2} dx ]

    independent of the split point xi.  The boundary terms at 0 vanish
    because the jet removal flattens phi_hat there; at infinity the
    (d+1)-th derivative of the degree-d growth decays on its own.
    """
    prec = _resolve(prec)
    d = geom.d
    guard = 18 + 4 * d
    with mp.workdps(prec.working_digits + guard):
        xi_f = _as_mpf(xi)
        if xi_f <= 0:
            raise DomainError("split point must be positive")
        cs = phi_hat_taylor(geom, d + 1, prec)
        wd2 = prec.working_digits + guard - 10
        hi_prec = Precision(wd2, 10.0 ** (9 - wd2))

        def jet(x):
            acc = mp.mpf(0)
            for j in range(2, d + 2):
                acc += cs[j] * x ** j
            return acc

        def jet_deriv(order, x):
            acc = mp.mpf(0)
            for j in range(max(2, order), d + 2):
                acc += cs[j] * _as_mpf(math.factorial(j) // math.factorial(j - order)) \
                    * x ** (j - order)
            return acc

        def low(x):
            return (phi_hat(geom, x, hi_prec) - jet(x)) * x ** (-d - 2)

        fact_top = _as_mpf(math.factorial(d + 1))
        acc = -fact_top * cs[d + 1] * mp.log(xi_f)
        for k in range(1, d + 2):
            acc += _as_mpf(math.factorial(k - 1)) * xi_f ** (-k) * jet_deriv(d + 1 - k, xi_f)
        try:
            lo_int = mp.quad(low, [0, xi_f], method="gauss-legendre")
        except mp.NoConvergence as exc:  # pragma: no cover - defensive
            raise QuadratureFailure("log-weight low quadrature failed: %s" % exc) from exc
        hi_int = phi_hat_power_tail(geom, xi_f, prec)
        return acc - fact_top * (lo_int + hi_int)


def phi_hat_power_tail(geom: CapGeometry, lower, prec: Precision | None = None):
    """int_lower^inf x^{-d-2} phi_hat(x) dx, via the substitution x = 1/w."""
    prec = _resolve(prec)
    d = geom.d
    with mp.workdps(prec.working_digits + 10):
        lo = _as_mpf(lower)
        if lo <= 0:
            raise DomainError("lower limit must be positive")

        def integrand(w):
            return w ** d * phi_hat(geom, 1 / w, prec)

        try:
            return mp.quad(integrand, [0, 1 / lo], method="gauss-legendre")
        except mp.NoConvergence as exc:  # pragma: no cover - defensive
            raise QuadratureFailure("power-tail quadrature failed: %s" % exc) from exc


def pf_compact_form(geom: CapGeometry, prec: Precision | None = None,
                    xi=Fraction(1, 2)):
    """The partie finie in its harmonic-number grouping.

    H_{d+1} c_{d+1} - J/(d+1)! - int_Y^inf x^{-d-2} phi_hat dx with
    Y = 2/(d-1): equal to pf_integral_phi by an exact by-parts identity,
    but assembled from an independent set of quadratures.
    """
    prec = _resolve(prec)
    d = geom.d
    with mp.workdps(prec.working_digits + 10):
        cs = phi_hat_taylor(geom, d + 1, prec)
        j_val = log_weight_derivative_integral(geom, prec, xi)
        tail = phi_hat_power_tail(geom, mp.mpf(2) / (d - 1), prec)
        h_top = _as_mpf(harmonic_number(d + 1))
        return h_top * cs[d + 1] - j_val / _as_mpf(math.factorial(d + 1)) - tail


# ---------------------------------------------------------------------------
# literal per-dimension transcriptions of zeta'(0)


def zeta_prime0_printed(D: int, sigma, theta0, prec: Precision | None = None):
    """Literal transcription of the quoted zeta'(0) for D = 3, 4, 5.

    The residual integrals are evaluated by the continuation-module
    quadratures; the boundary sum-to-integral term is the same odd-imaginary
    combination used by the general route.  The groupings are kept exactly
    as quoted: scheme constants appear as ln(1 + cos theta0) multiples and,
    at D = 4, inside the ln sin coefficient, so this route deviates from
    zeta_prime0_general away from theta0 -> 0 (see discrepancy_report).
    """
    d = _require_printed(D)
    prec = _resolve(prec)
    geom = CapGeometry(d, theta0, sigma)
    with mp.workdps(prec.working_digits + 10):
        th = geom.theta0
        log_sin = mp.log(mp.sin(th))
        log_opc = mp.log(1 + mp.cos(th))
        cs = phi_hat_taylor(geom, d + 1, prec)
        top_deriv = _as_mpf(math.factorial(d + 1)) * cs[d + 1]
        j_val = log_weight_derivative_integral(geom, prec)
        ap = -abel_plana_tail(geom, prec)
        half_phi = -phi_of_x(geom, 0, prec) / 2
        if D == 3:
            acc = -log_sin / 24 - log_opc / 12
            acc += riemann_zeta_deriv_neg(1, prec) / 2
            acc -= 3 * riemann_zeta_deriv_neg(2, prec) / 4
            acc += half_phi
            acc -= _as_mpf(Fraction(11, 36)) * top_deriv
            acc -= nonlocal_integral(2, geom, prec)
            acc += ap
            acc += j_val / 6
            acc += phi_hat_power_tail(geom, 2, prec)
            return acc
        if D == 4:
            acc = _as_mpf(Fraction(1, 240)) - log_sin / 90 + log_opc / 120
            acc += riemann_zeta_deriv_neg(1, prec) / 6
            acc -= riemann_zeta_deriv_neg(2, prec) / 2
            acc += riemann_zeta_deriv_neg(3, prec) / 3
            acc += half_phi
            acc -= _as_mpf(Fraction(25, 288)) * top_deriv
            acc -= nonlocal_integral(3, geom, prec) / 2
            acc += ap
            acc += j_val / 24
            acc += phi_hat_power_tail(geom, 1, prec)
            return acc
        acc = _as_mpf(Fraction(17, 5760)) * log_sin + _as_mpf(Fraction(17, 2880)) * log_opc
        acc -= 5 * riemann_zeta_deriv_neg(4, prec) / 64
        acc += 7 * riemann_zeta_deriv_neg(3, prec) / 48
        acc -= riemann_zeta_deriv_neg(2, prec) / 32
        acc -= riemann_zeta_deriv_neg(1, prec) / 48
        acc += half_phi
        acc -= _as_mpf(Fraction(137, 7200)) * top_deriv
        acc += (nonlocal_integral(2, geom, prec)
                - 4 * nonlocal_integral(4, geom, prec)) / 24
        acc += ap
        acc += j_val / 120
        acc += phi_hat_power_tail(geom, mp.mpf(2) / 3, prec)
        return acc


# ---------------------------------------------------------------------------
# determinant record


@dataclass(frozen=True)
class ZetaInvariants:
    """Invariants of one cap spectrum under the ln det = 2 Gamma convention."""

    d: int
    sigma: object
    theta0: object
    mu_scale: object
    zeta0: object
    zeta_prime0: object
    gamma: object
    logdet: object
    term_ledger: dict = field(default_factory=dict)


def logdet(d: int, sigma, theta0, mu_scale=1, prec: Precision | None = None) -> ZetaInvariants:
    """Full pipeline: zeta(0), zeta'(0) with ledger, effective action, ln det.

    ln det = -zeta'(0) - zeta(0) ln(mu_scale^2) and Gamma = ln det / 2.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        mu = _as_mpf(mu_scale)
        if mu <= 0:
            raise DomainError("mu_scale must be positive")
        terms = zeta_prime0_terms(d, sigma, theta0, prec)
        zp = mp.fsum(terms.values())
        z0 = zeta0_general(d, sigma, theta0, prec)
        ld = -zp - 2 * z0 * mp.log(mu)
        return ZetaInvariants(
            d=d, sigma=_as_mpf(sigma), theta0=_as_mpf(theta0), mu_scale=mu,
            zeta0=z0, zeta_prime0=zp, gamma=ld / 2, logdet=ld,
            term_ledger=dict(terms),
        )


# ---------------------------------------------------------------------------
# printed-versus-general discrepancy report


def _candidate_shifts(d: int, theta0, prec: Precision) -> dict:
    """Closed-form shifts that could explain printed-minus-general."""
    with mp.workdps(prec.working_digits + 10):
        th = _as_mpf(theta0)
        z0 = _as_mpf(base_zeta_exact(d, Fraction(0)))
        c_res = Fraction(0)
        for n in range(2, d + 1):
            c_res += bernoulli_cumulant(n) * base_zeta_residue(d, n)
        tower = -z0 * mp.log((1 + mp.cos(th)) / 2)
        cum = -2 * _as_mpf(c_res) * mp.log(mp.sin(th))
        return {
            "tower_log_promotion": tower,
            "cumulant_log_sin": cum,
            "combined": tower + cum,
        }


def discrepancy_report(D: int, sigma, theta0, prec: Precision | None = None,
                       include_prime: bool = True) -> dict:
    """Machine-readable printed-versus-general comparison at one point.

    zeta(0) carries the exact polynomial difference; zeta'(0) reports the
    numeric difference together with candidate closed-form shifts and which
    one (if any) matches within tolerance.
    """
    d = _require_printed(D)
    prec = _resolve(prec)
    wd = prec.working_digits

    def s(x):
        return mp.nstr(_as_mpf(x), wd)

    with mp.workdps(wd + 10):
        z_gen = zeta0_general(d, sigma, theta0, prec)
        z_pr = zeta0_printed(D, sigma, theta0, prec)
        disc = zeta0_discrepancy_poly(D)
        report = {
            "D": D,
            "d": d,
            "sigma": s(sigma),
            "theta0": s(theta0),
            "precision_digits": wd,
            "zeta0": {
                "general": s(z_gen),
                "printed": s(z_pr),
                "printed_minus_general": s(z_pr - z_gen),
                "printed_minus_general_poly": poly_sigma_s_str(disc) if disc else "0",
                "routes_agree_identically": not disc,
            },
        }
        if not include_prime:
            return report
        zp_gen = zeta_prime0_general(d, sigma, theta0, prec)
        zp_pr = zeta_prime0_printed(D, sigma, theta0, prec)
        diff = zp_pr - zp_gen
        cands = _candidate_shifts(d, theta0, prec)
        tol = (1 + abs(diff)) * mp.mpf(10) ** (-(wd // 2))
        matched = "unmatched"
        if abs(diff) < tol:
            matched = "none_needed"
        else:
            for name, val in cands.items():
                if abs(diff - val) < tol:
                    matched = name
                    break
        report["zeta_prime0"] = {
            "general": s(zp_gen),
            "printed": s(zp_pr),
            "printed_minus_general": s(diff),
            "candidate_shifts": {k: s(v) for k, v in cands.items()},
            "matched_candidate": matched,
        }
        return report
