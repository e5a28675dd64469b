"""Scalar special functions and shared value types.

Everything here is arbitrary-precision (mpmath) and stateless: callers pass a
Precision and get back mpf values computed under a guarded working context.
Exact rational results (Bernoulli data, zeta at nonpositive integers) are
returned as fractions.Fraction so downstream polynomial identities stay exact.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .errors import (
    Divergence,
    DomainError,
    NonPositiveValue,
    PoleAtOne,
    UnsupportedDimension,
)

__all__ = [
    "Precision",
    "DEFAULT_PRECISION",
    "CapGeometry",
    "bernoulli_number",
    "bernoulli_poly",
    "harmonic_number",
    "digamma_positive_integer",
    "digamma_int_or_half",
    "riemann_zeta",
    "riemann_zeta_exact_nonpos",
    "riemann_zeta_deriv_neg",
    "zeta_deriv_em",
    "hurwitz_zeta",
    "hurwitz_zeta_exact_nonpos",
    "hurwitz_zeta_deriv_at_neg",
    "gauss_2f1",
    "log_gamma",
    "binet_j",
    "ferrers_p",
    "log_ferrers_p",
    "log_ferrers_conical",
    "log_ferrers_w2",
]

THETA0_MAX_DEFECT = 1e-3  # theta0 must stay below pi by at least this much


@dataclass(frozen=True)
class Precision:
    """Working precision contract for every numerical routine.

    working_digits is the decimal precision of intermediate arithmetic;
    target_rel_tol is what callers may demand of quadratures and series and
    must leave at least eight guard digits below working precision.
    """

    working_digits: int = 50
    target_rel_tol: float = 1e-40

    def __post_init__(self) -> None:
        if self.working_digits < 30:
            raise DomainError("working_digits must be at least 30")
        floor = 10.0 ** (8 - self.working_digits) if self.working_digits < 300 else 0.0
        if not (self.target_rel_tol > 0):
            raise DomainError("target_rel_tol must be positive")
        if self.target_rel_tol < floor:
            raise DomainError(
                "target_rel_tol %.3g below the 10^(8-working_digits) floor" % self.target_rel_tol
            )

    @property
    def eps(self):
        return mp.mpf(10) ** (-self.working_digits)

    def doubled(self) -> "Precision":
        return Precision(2 * self.working_digits, self.target_rel_tol)


DEFAULT_PRECISION = Precision()


def _resolve(prec: Precision | None) -> Precision:
    return prec if prec is not None else DEFAULT_PRECISION


def _as_mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


@dataclass(frozen=True)
class CapGeometry:
    """Cap of polar angle theta0 over a unit d-sphere base, with shifted mass sigma.

    sigma**2 = mass**2 + d**2/4 when built from a mass; tests and the
    conformally coupled case feed sigma directly, which may lie below d/2.
    """

    d: int
    theta0: object
    sigma: object
    mass: object = None

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or not 2 <= self.d <= 8:
            raise UnsupportedDimension("base dimension d=%r outside [2, 8]" % (self.d,))
        object.__setattr__(self, "theta0", _as_mpf(self.theta0))
        object.__setattr__(self, "sigma", _as_mpf(self.sigma))
        if self.mass is not None:
            object.__setattr__(self, "mass", _as_mpf(self.mass))
        if not (0 < self.theta0 <= mp.pi - THETA0_MAX_DEFECT * 0.999999):
            raise DomainError("theta0 must lie in (0, pi - 1e-3]")
        if self.sigma < 0:
            raise DomainError("sigma must be nonnegative")

    @classmethod
    def from_sigma(cls, d: int, theta0, sigma) -> "CapGeometry":
        return cls(d, theta0, sigma)

    @classmethod
    def from_mass(cls, d: int, theta0, mass) -> "CapGeometry":
        m = _as_mpf(mass)
        if m < 0:
            raise DomainError("mass must be nonnegative")
        sigma = mp.sqrt(m * m + mp.mpf(d) ** 2 / 4)
        return cls(d, theta0, sigma, mass=m)

    @property
    def ambient_dim(self) -> int:
        """Dimension D = d + 1 of the cap itself."""
        return self.d + 1

    @property
    def s_half(self):
        """sin(theta0/2)**2, the hypergeometric argument for this cap."""
        return mp.sin(self.theta0 / 2) ** 2


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials, exact


_BERNOULLI_CACHE: dict[int, Fraction] = {0: Fraction(1), 1: Fraction(-1, 2)}
_BERNOULLI_LOCK = threading.Lock()


def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number B_n (B_1 = -1/2 convention)."""
    if n < 0:
        raise DomainError("Bernoulli index must be nonnegative")
    got = _BERNOULLI_CACHE.get(n)
    if got is not None:
        return got
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    # fill synchronized so concurrent readers never see a partial table
    with _BERNOULLI_LOCK:
        top = max(k for k in _BERNOULLI_CACHE if k <= n)
        for m in range(top + 1, n + 1):
            if m % 2 == 1:
                _BERNOULLI_CACHE[m] = Fraction(0) if m > 1 else Fraction(-1, 2)
                continue
            acc = Fraction(0)
            binom = 1  # C(m+1, k)
            for k in range(m):
                acc += binom * _BERNOULLI_CACHE[k]
                binom = binom * (m + 1 - k) // (k + 1)
            _BERNOULLI_CACHE[m] = -acc / (m + 1)
        return _BERNOULLI_CACHE[n]


def bernoulli_poly(n: int, x):
    """Bernoulli polynomial B_n(x); exact Fraction when x is rational."""
    exact = isinstance(x, (int, Fraction))
    xv = Fraction(x) if exact else _as_mpf(x)
    acc = Fraction(0) if exact else mp.mpf(0)
    binom = 1  # C(n, k)
    for k in range(n + 1):
        b = bernoulli_number(k)
        coeff = binom * b
        term = (Fraction(coeff) if exact else _as_mpf(coeff)) * xv ** (n - k)
        acc = acc + term
        binom = binom * (n - k) // (k + 1)
    return acc


def harmonic_number(n: int) -> Fraction:
    if n < 0:
        raise DomainError("harmonic index must be nonnegative")
    acc = Fraction(0)
    for k in range(1, n + 1):
        acc += Fraction(1, k)
    return acc


def digamma_positive_integer(n: int, prec: Precision | None = None):
    """psi(n) = -gamma + H_{n-1} for integer n >= 1."""
    if n < 1:
        raise DomainError("digamma_positive_integer needs n >= 1")
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        return -mp.euler + _as_mpf(harmonic_number(n - 1))


def digamma_int_or_half(a: Fraction, prec: Precision | None = None):
    """psi(a) for positive a that is an integer or half-integer.

    psi(1/2) = -gamma - 2 ln 2 plus the usual upward recurrence.
    """
    prec = _resolve(prec)
    a = Fraction(a)
    with mp.workdps(prec.working_digits + 10):
        if a.denominator == 1:
            return digamma_positive_integer(int(a), prec)
        if a.denominator != 2 or a <= 0:
            raise DomainError("argument must be a positive integer or half-integer")
        q = int(a - Fraction(1, 2))  # a = q + 1/2
        acc = -mp.euler - 2 * mp.log(2)
        extra = Fraction(0)
        for j in range(q):
            extra += Fraction(1, 2 * j + 1)
        return acc + 2 * _as_mpf(extra)


# ---------------------------------------------------------------------------
# Riemann and Hurwitz zeta via Euler-Maclaurin


def riemann_zeta_exact_nonpos(n: int) -> Fraction:
    """zeta(-n) = -B_{n+1}(1)/(n+1) for integer n >= 0, exactly.

    The polynomial at 1 rather than the bare number keeps n = 0 correct
    under the B_1 = -1/2 convention.
    """
    if n < 0:
        raise DomainError("expected a nonpositive argument, got -(%d)" % n)
    return hurwitz_zeta_exact_nonpos(n, Fraction(1))


def hurwitz_zeta_exact_nonpos(n: int, a: Fraction) -> Fraction:
    """zeta_H(-n, a) = -B_{n+1}(a)/(n+1) for integer n >= 0 and rational a."""
    if n < 0:
        raise DomainError("expected a nonpositive argument")
    return -Fraction(bernoulli_poly(n + 1, Fraction(a))) / (n + 1)


def _em_tail(s, a, N, dps_guard_eps, deriv: bool):
    """Euler-Maclaurin boundary and correction terms at cutoff N.

    Returns the value tail, or its s-derivative when deriv is set.
    """
    Na = a + N
    L = mp.log(Na)
    if not deriv:
        acc = Na ** (1 - s) / (s - 1) + Na ** (-s) / 2
    else:
        acc = Na ** (1 - s) * (-L / (s - 1) - 1 / (s - 1) ** 2) - L * Na ** (-s) / 2
    poch = s  # (s)_{2j-1}
    dpoch = mp.mpf(1)
    power = Na ** (-s - 1)
    j = 1
    while True:
        b = bernoulli_number(2 * j)
        c = _as_mpf(b) / mp.factorial(2 * j)
        term = c * (dpoch - L * poch) * power if deriv else c * poch * power
        acc += term
        if abs(term) < dps_guard_eps * (abs(acc) + 1):
            return acc
        if j >= 250:
            raise Divergence("Euler-Maclaurin correction failed to reach tolerance")
        dpoch = dpoch * (s + 2 * j - 1) * (s + 2 * j) + poch * (2 * s + 4 * j - 1)
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        power = power / Na ** 2
        j += 1


def hurwitz_zeta(s, a, prec: Precision | None = None):
    """Hurwitz zeta for real s != 1 and a > 0, Euler-Maclaurin continued.

    Exact Bernoulli-polynomial values are used at nonpositive integer s.
    """
    prec = _resolve(prec)
    s_f = _as_mpf(s)
    if s_f == 1:
        raise PoleAtOne("zeta_H(s, a) has its pole at s = 1")
    if mp.isint(s_f) and s_f <= 0 and isinstance(a, (int, Fraction)):
        return _as_mpf(hurwitz_zeta_exact_nonpos(int(-s_f), Fraction(a)))
    with mp.workdps(prec.working_digits + 12):
        a_f = _as_mpf(a)
        if a_f <= 0:
            raise DomainError("hurwitz_zeta needs a > 0")
        s_f = _as_mpf(s)
        N = prec.working_digits + 12
        eps = mp.mpf(10) ** (-(prec.working_digits + 8))
        acc = mp.mpf(0)
        for k in range(N):
            acc += (a_f + k) ** (-s_f)
        acc += _em_tail(s_f, a_f, N, eps, deriv=False)
        return acc


def riemann_zeta(s, prec: Precision | None = None):
    """Riemann zeta for real s != 1; exact rationals at nonpositive integers."""
    prec = _resolve(prec)
    s_f = _as_mpf(s)
    if s_f == 1:
        raise PoleAtOne("zeta(s) has its pole at s = 1")
    if mp.isint(s_f) and s_f <= 0:
        return _as_mpf(riemann_zeta_exact_nonpos(int(-s_f)))
    return hurwitz_zeta(s, 1, prec)


def zeta_deriv_em(s, a=1, prec: Precision | None = None):
    """d/ds zeta_H(s, a) by term-wise differentiated Euler-Maclaurin.

    Valid at any real s != 1; this is the generic route, the reductions in
    hurwitz_zeta_deriv_at_neg are the preferred one at negative integers.
    """
    prec = _resolve(prec)
    s_f = _as_mpf(s)
    if s_f == 1:
        raise PoleAtOne("derivative requested at the pole s = 1")
    with mp.workdps(prec.working_digits + 15):
        a_f = _as_mpf(a)
        s_f = _as_mpf(s)
        N = prec.working_digits + 15
        eps = mp.mpf(10) ** (-(prec.working_digits + 8))
        acc = mp.mpf(0)
        for k in range(N):
            base = a_f + k
            acc += -mp.log(base) * base ** (-s_f)
        acc += _em_tail(s_f, a_f, N, eps, deriv=True)
        return acc


def riemann_zeta_deriv_neg(m: int, prec: Precision | None = None):
    """zeta'(-m) for integer m >= 0 through the reflection formula.

    Even -m reduces to zeta(2p+1); odd -m needs zeta'(2p) which comes from
    the differentiated Euler-Maclaurin sum.
    """
    if m < 0:
        raise DomainError("riemann_zeta_deriv_neg expects m >= 0")
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        if m == 0:
            return -mp.log(2 * mp.pi) / 2
        if m % 2 == 0:
            p = m // 2
            return (
                (-1) ** p
                * mp.pi
                * (2 * mp.pi) ** (-2 * p - 1)
                * mp.factorial(2 * p)
                * riemann_zeta(2 * p + 1, prec)
            )
        p = (m + 1) // 2  # m = 2p - 1
        lead = _as_mpf(bernoulli_number(2 * p)) / (2 * p)
        lead *= digamma_positive_integer(2 * p, prec) - mp.log(2 * mp.pi)
        corr = (
            (-1) ** (p + 1)
            * 2
            * mp.factorial(2 * p - 1)
            * (2 * mp.pi) ** (-2 * p)
            * zeta_deriv_em(2 * p, 1, prec)
        )
        return lead + corr


def hurwitz_zeta_deriv_at_neg(alpha: int, d: int, prec: Precision | None = None):
    """zeta_H'(-alpha, (d+1)/2) reduced to Riemann-zeta data.

    Odd d gives an integer second argument, even d a half-integer; both
    reductions bottom out in riemann_zeta_deriv_neg. d = 0 (argument 1/2)
    is allowed for internal reuse.
    """
    if alpha < 0:
        raise DomainError("alpha must be a nonnegative integer")
    if d < 0 or d % 1:
        raise DomainError("d must be a nonnegative integer")
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        if d % 2 == 1:
            # argument (d+1)/2 = q+1 integer: strip the first q terms of the sum
            q = (d + 1) // 2 - 1
            acc = riemann_zeta_deriv_neg(alpha, prec)
            for n in range(1, q + 1):
                acc += mp.mpf(n) ** alpha * mp.log(n)
            return acc
        # argument q + 1/2: odd-integer lattice in disguise
        q = d // 2
        two_a = mp.mpf(2) ** (-alpha)
        acc = two_a * mp.log(2) * riemann_zeta(-alpha, prec)
        acc += (two_a - 1) * riemann_zeta_deriv_neg(alpha, prec)
        for j in range(1, q + 1):
            odd = mp.mpf(2 * j - 1)
            acc += two_a * (-mp.log(2) * odd**alpha + odd**alpha * mp.log(odd))
        return acc


# ---------------------------------------------------------------------------
# Gauss hypergeometric


def _is_nonpos_int(x, tol) -> bool:
    return x <= tol and abs(x - mp.nint(x)) < tol


def _2f1_series(a, b, c, x, eps, max_terms):
    term = mp.mpf(1)
    acc = mp.mpf(1)
    n = 0
    while True:
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        term = term * ratio
        acc += term
        n += 1
        if term == 0:
            return acc
        r = abs(x) * (1 + (abs(a) + abs(b)) / n)
        if r < 1 and abs(term) * r / (1 - r) < eps * abs(acc):
            return acc
        if n > max_terms:
            raise Divergence("2F1 series did not meet tolerance in %d terms" % max_terms)


def gauss_2f1(a, b, c, x, prec: Precision | None = None):
    """2F1(a, b; c; x) for real parameters and 0 <= x < 1.

    Direct series below x = 0.6; above, the c-a-b connection toward argument
    1-x when c-a-b is not an integer, mpmath's implementation otherwise
    (degenerate logarithmic case). Terminating series always summed exactly.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 12):
        a, b, c, x = (_as_mpf(v) for v in (a, b, c, x))
        tol = mp.mpf(10) ** (-prec.working_digits - 2)
        eps = mp.mpf(10) ** (-(prec.working_digits + 6))
        if not 0 <= x < 1:
            raise DomainError("gauss_2f1 argument must lie in [0, 1)")
        for p in (a, b):
            if _is_nonpos_int(p, tol):
                # polynomial case, c may be anything not hit before termination
                nmax = int(-mp.nint(p))
                term = mp.mpf(1)
                acc = mp.mpf(1)
                for n in range(nmax):
                    term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * x
                    acc += term
                return acc
        if _is_nonpos_int(c, tol):
            raise DomainError("2F1 undefined at nonpositive integer c")
        max_terms = 400 * (prec.working_digits + 10)
        # Large c suppresses every early term (ratio ~ x n / c), so the direct
        # series is stable there even near x = 1; the 1-x connection would
        # route through two huge-parameter series with a catastrophic hump.
        if x <= mp.mpf("0.6") or c > (abs(a) + abs(b) + 6) / (1 - x):
            return _2f1_series(a, b, c, x, eps, max_terms)
        m = c - a - b
        if abs(m - mp.nint(m)) > tol:
            y = 1 - x
            f1 = _2f1_series(a, b, a + b - c + 1, y, eps, max_terms)
            f2 = _2f1_series(c - a, c - b, m + 1, y, eps, max_terms)
            g1 = mp.gamma(c) * mp.gamma(m) * mp.rgamma(c - a) * mp.rgamma(c - b)
            g2 = mp.gamma(c) * mp.gamma(-m) * mp.rgamma(a) * mp.rgamma(b)
            return g1 * f1 + g2 * y**m * f2
        return mp.hyp2f1(a, b, c, x)


# ---------------------------------------------------------------------------
# Log-gamma and the Binet remainder


def log_gamma(x, prec: Precision | None = None):
    """ln Gamma(x) for x > 0."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        x = _as_mpf(x)
        if x <= 0:
            raise DomainError("log_gamma restricted to x > 0 here")
        return mp.loggamma(x)


def binet_j(x, prec: Precision | None = None):
    """Binet remainder J(x) = ln Gamma(x) - (x - 1/2) ln x + x - ln(2 pi)/2.

    Exposed separately because the subtraction oracle consumes it; computed
    with enough guard digits to survive the cancellation at large x.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 25):
        x = _as_mpf(x)
        if x <= 0:
            raise DomainError("binet_j restricted to x > 0")
        return mp.loggamma(x) - (x - mp.mpf(1) / 2) * mp.log(x) + x - mp.log(2 * mp.pi) / 2


# ---------------------------------------------------------------------------
# Ferrers functions of negative order


def ferrers_p(nu_degree, mu, theta, prec: Precision | None = None):
    """Ferrers P^{-mu}_{nu}(cos theta) for real degree, order -mu <= 0.

    tan(theta/2)**mu / Gamma(mu+1) * 2F1(-nu, nu+1; mu+1; sin(theta/2)**2);
    mpf arithmetic does not overflow, so no scaled variant is needed.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 12):
        nu, mu_f, theta_f = (_as_mpf(v) for v in (nu_degree, mu, theta))
        if not 0 < theta_f < mp.pi:
            raise DomainError("theta must lie in (0, pi)")
        if mu_f < 0:
            raise DomainError("mu must be nonnegative (order is -mu)")
        s_half = mp.sin(theta_f / 2) ** 2
        f = gauss_2f1(-nu, nu + 1, mu_f + 1, s_half, prec)
        return mp.tan(theta_f / 2) ** mu_f * mp.rgamma(mu_f + 1) * f


def _oscillation_guard_digits(w, s_half) -> int:
    """Extra decimal digits lost to cancellation in the real-degree series."""
    if w <= 2:
        return 0
    theta = 2 * math.asin(min(1.0, math.sqrt(float(s_half))))
    return int(0.4343 * float(w) * theta) + 12


def log_ferrers_p(nu_degree, mu, theta, prec: Precision | None = None):
    """ln of ferrers_p, evaluated stably in log form.

    NonPositiveValue signals that the hypergeometric factor is <= 0, i.e.
    the parameters sit at or beyond a Dirichlet root.
    """
    prec = _resolve(prec)
    nu = _as_mpf(nu_degree)
    w = nu + mp.mpf(1) / 2
    with mp.workdps(prec.working_digits + 12):
        theta_f = _as_mpf(theta)
        s_half = mp.sin(theta_f / 2) ** 2
    boost = _oscillation_guard_digits(w, s_half)
    with mp.workdps(prec.working_digits + 12 + boost):
        mu_f = _as_mpf(mu)
        theta_f = _as_mpf(theta)
        if not 0 < theta_f < mp.pi:
            raise DomainError("theta must lie in (0, pi)")
        s_half = mp.sin(theta_f / 2) ** 2
        f = gauss_2f1(mp.mpf(1) / 2 - w, mp.mpf(1) / 2 + w, mu_f + 1, s_half,
                      Precision(prec.working_digits + boost, prec.target_rel_tol))
        if f <= 0:
            raise NonPositiveValue(
                "2F1 factor nonpositive at w=%s, mu=%s (near or past a root)" % (w, mu_f)
            )
        return mu_f * mp.log(mp.tan(theta_f / 2)) - mp.loggamma(mu_f + 1) + mp.log(f)


def _conical_series_log_f(mu, y, s_half, dps):
    """ln 2F1(1/2-iy, 1/2+iy; mu+1; S) via the positive conjugate-pair series."""
    with mp.workdps(dps):
        term = mp.mpf(1)
        acc = mp.mpf(1)
        n = 0
        y2 = _as_mpf(y) ** 2
        eps = mp.mpf(10) ** (-dps + 5)
        while True:
            num = (n + mp.mpf(1) / 2) ** 2 + y2
            term = term * s_half * num / ((n + 1) * (n + mu + 1))
            acc += term
            n += 1
            if term < eps * acc:
                return mp.log(acc)
            if n > 2_000_000:
                raise Divergence("conical series failed to converge")


def _mehler_log_integral(mu, y, theta, dps):
    """ln of int_0^theta (cos t - cos theta)^(mu-1/2) cosh(y t) dt, stably.

    The e^{y theta} factor is pulled out; the rest is a positive integrand
    with an algebraic endpoint, split at its interior maximum.
    """
    with mp.workdps(dps):
        mu_f, y_f, th = _as_mpf(mu), _as_mpf(y), _as_mpf(theta)
        cth = mp.cos(th)

        def log_g(tau):
            # integrand of the e^{+yt} half after t -> theta - tau; None
            # where the cos difference rounds to <= 0 (negligible region)
            diff = mp.cos(th - tau) - cth
            if diff <= 0:
                return None
            return (mu_f - mp.mpf(1) / 2) * mp.log(diff) - y_f * tau

        # locate the maximum of log_g by bisection on its tau-derivative
        mu_s = float(mu_f) - 0.5
        y_s = float(y_f)
        th_s = float(th)

        def dlg(tau):
            return mu_s * math.sin(th_s - tau) / (math.cos(th_s - tau) - math.cos(th_s)) - y_s

        lo, hi = 1e-12, th_s - 1e-12
        tau_star = None
        if dlg(lo) > 0 and dlg(hi) < 0:
            for _ in range(80):
                mid = (lo + hi) / 2
                if dlg(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            tau_star = (lo + hi) / 2
        points = [mp.mpf(0)]
        if tau_star is not None and 1e-9 < tau_star < th_s - 1e-9:
            points.append(mp.mpf(tau_star))
        points.append(th)
        shift = log_g(points[1] if tau_star is not None else th / 2)
        if shift is None:
            raise Divergence("Mehler integrand vanished at its nominal peak")

        def g_scaled(tau):
            if tau <= 0 or tau >= th:
                return mp.mpf(0)
            lg = log_g(tau)
            if lg is None:
                return mp.mpf(0)
            val = mp.e ** (lg - shift)
            return val * (1 + mp.e ** (-2 * y_f * (th - tau)))

        integral = mp.quad(g_scaled, points)
        if not integral > 0:
            raise Divergence("Mehler integral quadrature collapsed")
        return y_f * th - mp.log(2) + shift + mp.log(integral)


def log_ferrers_conical(mu, y, theta, prec: Precision | None = None):
    """ln P^{-mu}_{-1/2 + i y}(cos theta) for real y, a positive function.

    Conjugate-pair series while its term count stays moderate, otherwise the
    Mehler-Dirichlet integral representation (mu > -1/2 required).
    """
    prec = _resolve(prec)
    dps = prec.working_digits + 12
    with mp.workdps(dps):
        mu_f, y_f, th = _as_mpf(mu), abs(_as_mpf(y)), _as_mpf(theta)
        if not 0 < th < mp.pi:
            raise DomainError("theta must lie in (0, pi)")
        s_half = mp.sin(th / 2) ** 2
        est_terms = float(y_f) * math.sqrt(float(s_half) / max(1e-12, 1 - float(s_half)))
        if est_terms < max(4000.0, 60.0 * dps):
            log_f = _conical_series_log_f(mu_f, y_f, s_half, dps)
            return mu_f * mp.log(mp.tan(th / 2)) - mp.loggamma(mu_f + 1) + log_f
        if mu_f <= -mp.mpf(1) / 2:
            raise DomainError("Mehler route needs mu > -1/2")
        log_int = _mehler_log_integral(mu_f, y_f, th, dps)
        return (
            mp.log(2 / mp.pi) / 2
            - mu_f * mp.log(mp.sin(th))
            - mp.loggamma(mu_f + mp.mpf(1) / 2)
            + log_int
        )


def log_ferrers_w2(mu, omega, theta, prec: Precision | None = None):
    """ln P^{-mu}_{-1/2 + sqrt(omega)}(cos theta) as an entire function of omega.

    omega = (degree + 1/2)**2; nonnegative omega is the real-degree Ferrers
    function, negative omega the conical one at y = sqrt(-omega). Both
    branches agree smoothly at omega = 0.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 12):
        om = _as_mpf(omega)
    if om >= 0:
        return log_ferrers_p(mp.sqrt(om) - mp.mpf(1) / 2, mu, theta, prec)
    return log_ferrers_conical(mu, mp.sqrt(-om), theta, prec)
