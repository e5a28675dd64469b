"""Uniform large-order expansion of the log Ferrers function.

ln P^{-mu}_{-1/2+w}(cos theta0) at w = i*mu*u expands, uniformly in u >= 0, as

    U_N = ln(t)/2 - ln(2*pi*mu)/2 + mu*(tau - ln u) - mu*ln(mu) + sum a_n/mu^n

with t = (1+u^2 sin^2 theta0)^(-1/2), nu = t cos theta0, and a phase tau.
The coefficients a_n(nu) combine Stirling cumulants with curly-A terms built
by an integro-differential recurrence. Orders n <= 2 close over the term
basis nu^j arctan(u nu)^p ln(1+u^2 nu^2)^q; n = 3 leaves it (dilogarithms),
raising BasisOverflow, and high orders come from a numerical fit instead.
The u -> 0 limit stays polynomial and is carried exactly over Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from mpmath import mp

from .errors import BasisOverflow, Divergence, DomainError
from .specfun import (
    Precision,
    _as_mpf,
    _resolve,
    bernoulli_number,
    log_ferrers_w2,
)

__all__ = [
    "GeometryPoint",
    "geometry_point",
    "NuSeries",
    "curly_a_list",
    "cumulant_series",
    "cumulant_values",
    "bernoulli_cumulant",
    "limit_curly_a",
    "limit_cumulants_s",
    "mu_series_g",
    "eval_sigma_s_poly",
    "poly_sigma_s_str",
    "coefficients_by_extraction",
    "log_p_uniform",
    "a_tilde",
    "a_tilde_at_zero",
]


# ---------------------------------------------------------------------------
# geometry of the uniform variable


@dataclass(frozen=True)
class GeometryPoint:
    """Derived quantities at one value of the uniform ratio u = |w|/mu."""

    u: object
    theta0: object
    t: object
    nu: object
    tau: object            # -inf at u = 0
    tau_minus_log_u: object


def geometry_point(u, theta0, prec: Precision | None = None) -> GeometryPoint:
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        u = _as_mpf(u)
        th = _as_mpf(theta0)
        if u < 0:
            raise DomainError("u must be nonnegative")
        sn, cs = mp.sin(th), mp.cos(th)
        root = mp.sqrt(1 + u**2 * sn**2)
        t = 1 / root
        nu = t * cs
        # tau - ln u extends continuously to u = 0 with value 1 + ln tan(theta0/2)
        tml = 1 + mp.log(sn) - mp.log(root + cs)
        if u > 0:
            # arccot on (0, pi) keeps the phase continuous through nu = 0
            tml += -u * mp.atan(1 / u) + u * (mp.pi / 2 - mp.atan(u * t * cs))
            tau = tml + mp.log(u)
        else:
            tau = mp.ninf
        return GeometryPoint(u=u, theta0=th, t=t, nu=nu, tau=tau, tau_minus_log_u=tml)


# ---------------------------------------------------------------------------
# closed term basis nu^j arctan(u nu)^p ln(1+u^2 nu^2)^q over numeric u


class NuSeries:
    """Finite combination of nu^j * arctan(u nu)^p * ln(1+u^2 nu^2)^q terms.

    Coefficients are mpf at a fixed numeric u; the basis is closed under
    multiplication, the derivative operator (1+u^2 nu^2) d/dnu, and under
    antidifferentiation except for the irreducible (j,p,q) = (0,*,>=1) cell.
    """

    __slots__ = ("u", "terms")

    def __init__(self, u, terms=None):
        self.u = u
        self.terms = dict(terms) if terms else {}

    def _add_term(self, key, coeff):
        cur = self.terms.get(key)
        new = coeff if cur is None else cur + coeff
        if new == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    def add(self, other: "NuSeries") -> "NuSeries":
        out = NuSeries(self.u, self.terms)
        for k, c in other.terms.items():
            out._add_term(k, c)
        return out

    def scale(self, c) -> "NuSeries":
        return NuSeries(self.u, {k: v * c for k, v in self.terms.items()})

    def mul(self, other: "NuSeries") -> "NuSeries":
        out = NuSeries(self.u)
        for (j1, p1, q1), c1 in self.terms.items():
            for (j2, p2, q2), c2 in other.terms.items():
                out._add_term((j1 + j2, p1 + p2, q1 + q2), c1 * c2)
        return out

    def diff_weighted(self) -> "NuSeries":
        """(1 + u^2 nu^2) d/dnu applied term-wise."""
        u = self.u
        out = NuSeries(u)
        for (j, p, q), c in self.terms.items():
            if j:
                out._add_term((j - 1, p, q), c * j)
                out._add_term((j + 1, p, q), c * j * u**2)
            if p:
                out._add_term((j, p - 1, q), c * p * u)
            if q:
                out._add_term((j + 1, p, q - 1), c * q * 2 * u**2)
        return out

    def eval(self, nu):
        u = self.u
        at = mp.atan(u * nu)
        lg = mp.log(1 + u**2 * nu**2)
        acc = mp.mpf(0)
        for (j, p, q), c in self.terms.items():
            acc += c * nu**j * at**p * lg**q
        return acc

    def integrate_from_one(self) -> "NuSeries":
        """Definite integral from 1 to nu, as a new series."""
        anti = NuSeries(self.u)
        for key, c in self.terms.items():
            anti = anti.add(_int_term(self.u, key).scale(c))
        const = anti.eval(mp.mpf(1))
        anti._add_term((0, 0, 0), -const)
        return anti

    def integrate_weight_from_one(self) -> "NuSeries":
        """Definite integral of self/(1+u^2 nu'^2) from 1 to nu."""
        anti = NuSeries(self.u)
        for key, c in self.terms.items():
            anti = anti.add(_int_term_w(self.u, key).scale(c))
        const = anti.eval(mp.mpf(1))
        anti._add_term((0, 0, 0), -const)
        return anti


def _int_term(u, key) -> NuSeries:
    """Antiderivative of nu^j arctan^p ln^q within the basis."""
    j, p, q = key
    lead = NuSeries(u, {(j + 1, p, q): mp.mpf(1) / (j + 1)})
    if p == 0 and q == 0:
        return lead
    if p:
        lead = lead.add(_int_term_w(u, (j + 1, p - 1, q)).scale(-p * u / (j + 1)))
    if q:
        lead = lead.add(_int_term_w(u, (j + 2, p, q - 1)).scale(-2 * q * u**2 / (j + 1)))
    return lead


def _int_term_w(u, key) -> NuSeries:
    """Antiderivative of nu^j arctan^p ln^q / (1+u^2 nu^2) within the basis."""
    j, p, q = key
    if j >= 2:
        inner = _int_term(u, (j - 2, p, q)).add(_int_term_w(u, (j - 2, p, q)).scale(-1))
        return inner.scale(1 / u**2)
    if j == 1:
        out = NuSeries(u, {(0, p, q + 1): 1 / (2 * u**2 * (q + 1))})
        if p:
            out = out.add(_int_term_w(u, (0, p - 1, q + 1)).scale(-p / (2 * u * (q + 1))))
        return out
    # j == 0
    if q == 0:
        return NuSeries(u, {(0, p + 1, 0): 1 / ((p + 1) * u)})
    raise BasisOverflow(
        "antiderivative of arctan^%d ln^%d/(1+u^2 nu^2) leaves the closed basis" % (p, q)
    )


def curly_a_list(u, sigma2, n_max: int, prec: Precision | None = None) -> list[NuSeries]:
    """Curly-A recurrence terms A_1..A_n as NuSeries at numeric u > 0.

    A_{n+1} = (1-nu^2)(1+u^2 nu^2) A_n' / (2(1+u^2))
              - u^2/(8(1+u^2)) * [ int_1^nu (5 nu'^2 + 1/u^2 - 1) A_n
                                   - 4 sigma^2 (1+u^2)/u^2 * int_1^nu A_n/(1+u^2 nu'^2) ]

    Raises BasisOverflow at the first order whose antiderivatives leave the
    term basis (n = 3 in practice).
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        u = _as_mpf(u)
        s2 = _as_mpf(sigma2)
        if u <= 0:
            raise DomainError("curly_a_list needs u > 0; the limit route covers u = 0")
        one_u2 = 1 + u**2
        poly_weight = NuSeries(u, {(2, 0, 0): mp.mpf(5), (0, 0, 0): 1 / u**2 - 1})
        out: list[NuSeries] = []
        cur = NuSeries(u, {(0, 0, 0): mp.mpf(1)})
        for _ in range(n_max):
            bracket = poly_weight.mul(cur).integrate_from_one()
            bracket = bracket.add(
                cur.integrate_weight_from_one().scale(-4 * s2 * one_u2 / u**2)
            )
            nxt = _one_minus_nu2(u).mul(cur.diff_weighted()).scale(1 / (2 * one_u2))
            nxt = nxt.add(bracket.scale(-(u**2) / (8 * one_u2)))
            out.append(nxt)
            cur = nxt
        return out


def _one_minus_nu2(u) -> NuSeries:
    return NuSeries(u, {(0, 0, 0): mp.mpf(1), (2, 0, 0): mp.mpf(-1)})


def bernoulli_cumulant(n: int) -> Fraction:
    """Stirling-series cumulant: zeta(-n)/n, zero at even n."""
    if n < 1:
        raise DomainError("cumulant index starts at 1")
    if n % 2 == 0:
        return Fraction(0)
    return -bernoulli_number(n + 1) / (n * (n + 1))


def _log_compose(blocks: list, mul, scale, add):
    """Coefficients of log(1 + sum blocks[n] x^n) in any commutative ring."""
    out: list = []
    for n in range(1, len(blocks) + 1):
        g = blocks[n - 1]
        for k in range(1, n):
            g = add(g, scale(mul(out[k - 1], blocks[n - k - 1]), Fraction(-k, n)))
        out.append(g)
    return out


def cumulant_series(u, sigma2, n_max: int, prec: Precision | None = None) -> list[NuSeries]:
    """Expansion coefficients a_1..a_n as NuSeries (Bernoulli part included)."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        u = _as_mpf(u)
        blocks = curly_a_list(u, sigma2, n_max, prec)
        logs = _log_compose(
            blocks,
            mul=lambda a, b: a.mul(b),
            scale=lambda a, c: a.scale(_as_mpf(c)),
            add=lambda a, b: a.add(b),
        )
        for n, series in enumerate(logs, start=1):
            c = bernoulli_cumulant(n)
            if c:
                series._add_term((0, 0, 0), _as_mpf(c))
        return logs


def cumulant_values(u, theta0, sigma2, n_max: int, prec: Precision | None = None) -> list:
    """a_n evaluated at the geometry point nu(u), n = 1..n_max."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        gp = geometry_point(u, theta0, prec)
        series = cumulant_series(gp.u, sigma2, n_max, prec)
        return [s.eval(gp.nu) for s in series]


# ---------------------------------------------------------------------------
# exact u -> 0 limit over Q: polynomials in (nu, sigma^2), then (sigma^2, S)


def _pns_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, Fraction(0)) + c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pns_scale(a: dict, c: Fraction) -> dict:
    return {k: v * c for k, v in a.items()} if c else {}


def _pns_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i1, k1), c1 in a.items():
        for (i2, k2), c2 in b.items():
            key = (i1 + i2, k1 + k2)
            v = out.get(key, Fraction(0)) + c1 * c2
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def _pns_dnu(a: dict) -> dict:
    out = {}
    for (i, k), c in a.items():
        if i:
            out[(i - 1, k)] = c * i
    return out


def _pns_int_from_1(a: dict) -> dict:
    """Integral in nu from 1, exact."""
    out: dict = {}
    for (i, k), c in a.items():
        cc = c / (i + 1)
        out = _pns_add(out, {(i + 1, k): cc, (0, k): -cc})
    return out


def limit_curly_a(n_max: int) -> list[dict]:
    """Exact u -> 0 curly-A terms, dict {(nu_pow, sigma2_pow): Fraction}.

    Limit recurrence: A_{n+1} = (1-nu^2)/2 A_n' - (1-4 sigma^2)/8 int_1^nu A_n.
    """
    one_minus = {(0, 0): Fraction(1), (2, 0): Fraction(-1)}
    weight = {(0, 0): Fraction(-1, 8), (0, 1): Fraction(1, 2)}  # -(1-4 s2)/8
    out: list[dict] = []
    cur = {(0, 0): Fraction(1)}
    for _ in range(n_max):
        nxt = _pns_scale(_pns_mul(one_minus, _pns_dnu(cur)), Fraction(1, 2))
        nxt = _pns_add(nxt, _pns_mul(weight, _pns_int_from_1(cur)))
        out.append(nxt)
        cur = nxt
    return out


def _pns_to_s(a: dict) -> dict:
    """Substitute nu = 1 - 2S: returns {(sigma2_pow, S_pow): Fraction}."""
    out: dict = {}
    for (i, k), c in a.items():
        for t in range(i + 1):
            key = (k, t)
            v = out.get(key, Fraction(0)) + c * comb(i, t) * Fraction(-2) ** t
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def limit_cumulants_s(n_max: int) -> list[dict]:
    """Exact a_n(u=0) as {(sigma2_pow, S_pow): Fraction}, n = 1..n_max."""
    blocks = limit_curly_a(n_max)
    logs = _log_compose(
        blocks,
        mul=_pns_mul,
        scale=_pns_scale,
        add=_pns_add,
    )
    out = []
    for n, poly in enumerate(logs, start=1):
        c = bernoulli_cumulant(n)
        if c:
            poly = _pns_add(poly, {(0, 0): c})
        out.append(_pns_to_s(poly))
    return out


# ---------------------------------------------------------------------------
# cross-route: 1/mu expansion of ln 2F1(1/2-sigma, 1/2+sigma; mu+1; S)


def _pss_add(a, b):
    return _pns_add(a, b)


def _pss_mul(a, b):
    return _pns_mul(a, b)


def mu_series_g(n_max: int) -> list[dict]:
    """g_n with ln 2F1(1/2-s, 1/2+s; 1/x+1; S) = sum g_n x^n, exact.

    Each g_n is {(sigma2_pow, S_pow): Fraction}. The expansion follows from
    2F1 = 1 + sum_n p_n(sigma^2) S^n/n! x^n prod_{i<=n} (1+ix)^{-1} with
    p_n = prod_{j<n} ((1/2+j)^2 - sigma^2).
    """
    f: list[dict] = [dict() for _ in range(n_max + 1)]
    f[0] = {(0, 0): Fraction(1)}
    for n in range(1, n_max + 1):
        p = {(0, 0): Fraction(1)}
        for j in range(n):
            p = _pss_mul(p, {(0, 0): Fraction((2 * j + 1) ** 2, 4), (1, 0): Fraction(-1)})
        base = _pns_scale(_pss_mul(p, {(0, n): Fraction(1)}), Fraction(1, _factorial(n)))
        h = _inverse_rising_product(n, n_max - n)
        for r, hr in enumerate(h):
            if hr:
                f[n + r] = _pss_add(f[n + r], _pns_scale(base, hr))
    logs = _log_compose(f[1:], mul=_pss_mul, scale=_pns_scale, add=_pss_add)
    return logs


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _inverse_rising_product(n: int, order: int) -> list[Fraction]:
    """x-Taylor coefficients of prod_{i=1}^n (1+ix)^{-1} through x^order."""
    h = [Fraction(1)] + [Fraction(0)] * order
    for i in range(1, n + 1):
        # multiply by (1+ix)^{-1} = sum_r (-i)^r x^r
        out = [Fraction(0)] * (order + 1)
        for r in range(order + 1):
            acc = Fraction(0)
            pw = Fraction(1)
            for s in range(r, -1, -1):
                acc += h[s] * pw
                pw *= -i
            out[r] = acc
        h = out
    return h


def eval_sigma_s_poly(poly: dict, sigma2, s_val, prec: Precision | None = None):
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        s2 = _as_mpf(sigma2)
        sv = _as_mpf(s_val)
        acc = mp.mpf(0)
        for (k, m), c in poly.items():
            acc += _as_mpf(c) * s2**k * sv**m
        return acc


def poly_sigma_s_str(poly: dict) -> str:
    """Deterministic exact rendering, monomials ordered by (S, sigma^2) power."""
    if not poly:
        return "0"
    bits = []
    for (k, m), c in sorted(poly.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        mono = []
        if k:
            mono.append("sigma2" + ("^%d" % k if k > 1 else ""))
        if m:
            mono.append("S" + ("^%d" % m if m > 1 else ""))
        head = "(%s)" % c
        bits.append(head + ("*" + "*".join(mono) if mono else ""))
    return " + ".join(bits)


# ---------------------------------------------------------------------------
# numerical extraction of high-order coefficients


_EXTRACTION_CACHE: dict = {}


def coefficients_by_extraction(
    u,
    theta0,
    sigma2,
    prec: Precision | None = None,
    n_lo: int = 3,
    n_hi: int = 8,
    mu_base: int = 128,
):
    """Fit a_{n_lo}..a_{n_hi} at fixed u from exact ln P evaluations.

    The residual ln P - U_{n_lo - 1} is sampled on a geometric grid of
    integer-spaced large mu and solved as a Vandermonde system in 1/mu.
    Truncation bias enters at a_{n_hi+1}/mu_base^(n_hi+1-n).
    """
    prec = _resolve(prec)
    key = (
        mp.nstr(_as_mpf(u), 25),
        mp.nstr(_as_mpf(theta0), 25),
        mp.nstr(_as_mpf(sigma2), 25),
        prec.working_digits,
        n_lo,
        n_hi,
        mu_base,
    )
    hit = _EXTRACTION_CACHE.get(key)
    if hit is not None:
        return dict(hit)
    wd = prec.working_digits + 25
    hi_prec = Precision(wd, 10.0 ** (8 - wd))
    count = n_hi - n_lo + 1
    with mp.workdps(wd):
        u_f = _as_mpf(u)
        th = _as_mpf(theta0)
        s2 = _as_mpf(sigma2)
        if u_f <= 0:
            raise DomainError("extraction needs u > 0")
        mus = []
        m = mp.mpf(mu_base)
        for _ in range(count):
            mus.append(m)
            m = mp.mpf(int(m * 3 / 2))
        rows = []
        rhs = []
        for mu in mus:
            omega = s2 - (u_f * mu) ** 2
            ln_p = log_ferrers_w2(mu, omega, th, hi_prec)
            base = log_p_uniform(mu, u_f, th, s2, n_lo - 1, hi_prec)
            rows.append([mu ** mp.mpf(-n) for n in range(n_lo, n_hi + 1)])
            rhs.append(ln_p - base)
        sol = mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))
        out = {n_lo + i: sol[i] for i in range(count)}
    _EXTRACTION_CACHE[key] = dict(out)
    return out


def log_p_uniform(mu, u, theta0, sigma2, n_terms: int, prec: Precision | None = None,
                  high_coeffs: dict | None = None):
    """Uniform expansion U_N of ln P^{-mu}_{-1/2 + i mu u}(cos theta0).

    Coefficient orders above 2 are taken from high_coeffs when given and
    from the extraction fit otherwise. u = 0 uses the exact limit values.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 15):
        mu_f = _as_mpf(mu)
        u_f = _as_mpf(u)
        th = _as_mpf(theta0)
        s2 = _as_mpf(sigma2)
        if mu_f <= 0:
            raise DomainError("uniform expansion needs mu > 0")
        gp = geometry_point(u_f, th, prec)
        acc = mp.log(gp.t) / 2 - mp.log(2 * mp.pi * mu_f) / 2
        acc += mu_f * gp.tau_minus_log_u - mu_f * mp.log(mu_f)
        if n_terms <= 0:
            return acc
        if u_f == 0:
            s_val = mp.sin(th / 2) ** 2
            for n, poly in enumerate(limit_cumulants_s(n_terms), start=1):
                acc += eval_sigma_s_poly(poly, s2, s_val, prec) * mu_f ** (-n)
            return acc
        sym = cumulant_values(u_f, th, s2, min(n_terms, 2), prec)
        for n, val in enumerate(sym, start=1):
            acc += val * mu_f ** (-n)
        if n_terms >= 3:
            if high_coeffs is None:
                high_coeffs = coefficients_by_extraction(
                    u_f, th, s2, prec, n_lo=3, n_hi=max(n_terms, 8)
                )
            for n in range(3, n_terms + 1):
                acc += high_coeffs[n] * mu_f ** (-n)
        return acc


# ---------------------------------------------------------------------------
# the coefficient profile a_n as a function of v = u^2


def a_tilde(n: int, v, theta0, sigma2, prec: Precision | None = None):
    """a_n at u = sqrt(v), the nonlocal-integrand profile in v = u^2."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        v_f = _as_mpf(v)
        if v_f < 0:
            raise DomainError("v must be nonnegative")
        if v_f == 0:
            return a_tilde_at_zero(n, theta0, sigma2, prec)
        u = mp.sqrt(v_f)
        if n <= 2:
            return cumulant_values(u, theta0, sigma2, n, prec)[n - 1]
        fit = coefficients_by_extraction(u, theta0, sigma2, prec, n_lo=3, n_hi=max(8, n))
        return fit[n]


def a_tilde_at_zero(n: int, theta0, sigma2, prec: Precision | None = None):
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        s_val = mp.sin(_as_mpf(theta0) / 2) ** 2
        poly = limit_cumulants_s(n)[n - 1]
        return eval_sigma_s_poly(poly, sigma2, s_val, prec)
