"""Analytic continuation of the radial log-derivative sums.

The derivative of the regularized determinant assembles from:

* a continuation lemma for integrals int_eps^inf x^(-s) f'(x) dx whose
  integrand has power/log growth, keyed by an explicit asymptotic descriptor;
* the spectral side function phi(x) = d(x) ln 2F1(1/2-sigma, 1/2+sigma;
  mu_x+1; S) and its reciprocal-variable profile phi_hat(y) = y^d phi at
  mu = 1/y, whose small-y coefficients c_j are exact polynomials in
  (sigma^2, S);
* the partie finie of int_0^inf phi dx, an Abel-Plana boundary integral,
  and nonlocal integrals of the uniform coefficients a_n over v = u^2.

phi_hat is smooth from the right at y = 0 but its Taylor series is only
asymptotic (logarithmic branch points accumulate along the negative axis),
so small-y quadrature subtracts the exact polynomial jet instead of summing
the series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .asympt import (
    a_tilde,
    a_tilde_at_zero,
    bernoulli_cumulant,
    cumulant_values,
    coefficients_by_extraction,
    eval_sigma_s_poly,
    limit_cumulants_s,
    mu_series_g,
    _pns_add,
    _pns_scale,
)
from .basezeta import (
    base_zeta_deriv,
    base_zeta_exact,
    base_zeta_residue,
    harmonic_cumulant_residue_sum,
    mu_b_alpha,
    next_zeta_deriv0,
)
from .errors import (
    DescriptorMismatch,
    DifferentiationUnstable,
    Divergence,
    DomainError,
    QuadratureFailure,
    SingularDeterminant,
)
from .specfun import CapGeometry, Precision, _as_mpf, _resolve, gauss_2f1

__all__ = [
    "AsymptoticDescriptor",
    "lemma_continue",
    "phi_of_x",
    "phi_hat",
    "phi_hat_taylor",
    "phi_hat_derivs",
    "pf_integral_phi",
    "abel_plana_of",
    "abel_plana_tail",
    "nonlocal_integral",
    "g_r_log",
    "g_p_log",
    "g_p_reg",
    "g_r_reg",
    "g_p_zero",
    "curly_g_p",
    "pf_lambda0",
    "g_r_zero",
    "pole_balance_polys",
]


# ---------------------------------------------------------------------------
# continuation lemma


@dataclass(frozen=True)
class AsymptoticDescriptor:
    """Large-x behaviour of f as terms c * x^p * ln(x)^q.

    Powers p >= 0 with q in {0, 1}; a ln^q with q >= 2 at p = 0 would need
    higher-order poles and is rejected. The (0, 1) cell drives the pole, the
    (0, 0) cell the finite part; growing cells only feed the residual check.
    """

    terms: tuple

    def __post_init__(self) -> None:
        for p, q, _ in self.terms:
            if q not in (0, 1):
                raise DomainError("descriptor powers of ln x must be 0 or 1")
            if p == 0 and q == 1:
                continue
            if p < 0:
                raise DomainError("decaying terms belong to the residual, not the descriptor")

    def cell(self, p, q):
        acc = mp.mpf(0)
        for pp, qq, c in self.terms:
            if pp == p and qq == q:
                acc += _as_mpf(c)
        return acc

    def evaluate(self, x):
        acc = mp.mpf(0)
        lx = mp.log(x)
        for p, q, c in self.terms:
            acc += _as_mpf(c) * x ** _as_mpf(p) * lx**q
        return acc


def lemma_continue(f, descriptor: AsymptoticDescriptor, eps,
                   prec: Precision | None = None, check_at=None):
    """Continue int_eps^inf x^(-s) f'(x) dx to s = 0.

    Returns (pole_coeff, finite_part) = (c_{0,1}, c_{0,0} - f(eps)): every
    growing power term continues to -eps^p and is absorbed by the f(eps)
    bookkeeping, the ln x cell alone leaves a 1/s pole. The descriptor is
    verified by checking that the subtracted residual decays between two
    calibration points; DescriptorMismatch otherwise.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        eps_f = _as_mpf(eps)
        if eps_f <= 0:
            raise DomainError("lemma needs eps > 0")
        x1 = _as_mpf(check_at) if check_at is not None else max(mp.mpf(10), 4 * eps_f)
        scale = 1 + max((abs(_as_mpf(c)) for _, _, c in descriptor.terms), default=mp.mpf(0))
        atol = scale * mp.mpf(10) ** (-(prec.working_digits // 2))
        r1 = f(x1) - descriptor.evaluate(x1)
        r2 = f(2 * x1) - descriptor.evaluate(2 * x1)
        if abs(r2) > max(abs(r1), atol):
            raise DescriptorMismatch(
                "residual grows: |r(%s)|=%s, |r(%s)|=%s" % (x1, abs(r1), 2 * x1, abs(r2))
            )
        pole = descriptor.cell(0, 1)
        finite = descriptor.cell(0, 0) - f(eps_f)
        return pole, finite


# ---------------------------------------------------------------------------
# spectral side function and its reciprocal profile


def _hyp_log_complex(a, b, c, s_arg, prec: Precision):
    """ln 2F1(a, b; c; s_arg) for complex c, principal branch.

    Direct series when it converges comfortably; the 1-s_arg connection
    formula (c-a-b safely non-integer off the real axis) otherwise.
    """
    with mp.workdps(prec.working_digits + 12):
        a, b = _as_mpf(a), _as_mpf(b)
        c = mp.mpc(c)
        x = _as_mpf(s_arg)
        eps = mp.mpf(10) ** (-(prec.working_digits + 6))
        m = c - a - b
        if (x <= mp.mpf("0.7") or abs(mp.im(m)) < mp.mpf("0.1")
                or abs(c) > (abs(a) + abs(b) + 6) / (1 - x)):
            term = mp.mpc(1)
            acc = mp.mpc(1)
            n = 0
            cap = 600 * (prec.working_digits + 10)
            while True:
                term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * x
                acc += term
                n += 1
                if abs(term) < eps * abs(acc) and n > 4:
                    return mp.log(acc)
                if n > cap:
                    raise Divergence("complex 2F1 series exhausted its budget")
        y = 1 - x
        f1 = mp.hyp2f1(a, b, a + b - c + 1, y)
        f2 = mp.hyp2f1(c - a, c - b, m + 1, y)
        g1 = mp.gamma(c) * mp.gamma(m) / (mp.gamma(c - a) * mp.gamma(c - b))
        g2 = mp.gamma(c) * mp.gamma(-m) / (mp.gamma(a) * mp.gamma(b))
        return mp.log(g1 * f1 + g2 * y**m * f2)


def _log_hyp_at_c(geom: CapGeometry, c_param, prec: Precision):
    """ln 2F1(1/2-sigma, 1/2+sigma; c; S); SingularDeterminant when the
    real-parameter value is nonpositive (the cap spectrum has crossed zero)."""
    a = mp.mpf(1) / 2 - geom.sigma
    b = mp.mpf(1) / 2 + geom.sigma
    s_arg = geom.s_half
    if mp.im(mp.mpc(c_param)) == 0:
        f = gauss_2f1(a, b, mp.re(mp.mpc(c_param)), s_arg, prec)
        if f <= 0:
            raise SingularDeterminant(
                "hypergeometric factor nonpositive at c=%s: determinant not positive"
                % (c_param,)
            )
        return mp.log(f)
    return _hyp_log_complex(a, b, c_param, s_arg, prec)


def phi_of_x(geom: CapGeometry, x, prec: Precision | None = None):
    """phi(x) = d(x) * ln 2F1 at mu_x = x + (d-1)/2; accepts complex x."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 12):
        mu_x = mp.mpc(x) + mp.mpf(geom.d - 1) / 2
        if mp.im(mu_x) == 0:
            mu_x = mp.re(mu_x)
        log_f = _log_hyp_at_c(geom, mu_x + 1, prec)
        dd = mp.mpf(0) if mp.im(mp.mpc(mu_x)) == 0 else mp.mpc(0)
        for alpha, cb in mu_b_alpha(geom.d).items():
            dd += _as_mpf(cb) * mu_x**alpha
        return dd * log_f


def phi_hat(geom: CapGeometry, y, prec: Precision | None = None):
    """phi_hat(y) = sum_alpha b_alpha y^(d-alpha) ln 2F1(...; 1 + 1/y; S)."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 12):
        y_c = mp.mpc(y)
        if mp.im(y_c) == 0:
            y_c = mp.re(y_c)
            if y_c <= 0:
                raise DomainError("phi_hat real argument must be positive")
        log_f = _log_hyp_at_c(geom, 1 + 1 / y_c, prec)
        acc = mp.mpc(0)
        for alpha, cb in mu_b_alpha(geom.d).items():
            acc += _as_mpf(cb) * y_c ** (geom.d - alpha)
        out = acc * log_f
        return mp.re(out) if mp.im(mp.mpc(y)) == 0 else out


_TAYLOR_POLY_CACHE: dict = {}


def _phi_hat_taylor_polys(d: int, j_max: int) -> list[dict]:
    """Exact (sigma^2, S) polynomials for c_0..c_{j_max}."""
    key = (d, j_max)
    hit = _TAYLOR_POLY_CACHE.get(key)
    if hit is None:
        gs = mu_series_g(j_max)  # g_1..g_{j_max}
        b = mu_b_alpha(d)
        hit = []
        for j in range(j_max + 1):
            poly: dict = {}
            for alpha, cb in b.items():
                m = j - d + alpha
                if 1 <= m <= j_max:
                    poly = _pns_add(poly, _pns_scale(gs[m - 1], cb))
            hit.append(poly)
        _TAYLOR_POLY_CACHE[key] = hit
    return hit


def phi_hat_taylor(geom: CapGeometry, j_max: int, prec: Precision | None = None) -> list:
    """Asymptotic small-y coefficients c_0..c_{j_max} of phi_hat, as mpf."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        s2 = geom.sigma**2
        s_val = geom.s_half
        return [
            eval_sigma_s_poly(poly, s2, s_val, prec)
            for poly in _phi_hat_taylor_polys(geom.d, j_max)
        ]


def phi_hat_derivs(geom: CapGeometry, x0, j_max: int, prec: Precision | None = None) -> list:
    """Derivatives phi_hat^(j)(x0), j = 0..j_max, by a Cauchy circle.

    The circle radius stays at 0.45*x0: all singularities of phi_hat sit on
    the negative real axis accumulating at 0, so distance x0 is safe.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 15):
        x0 = _as_mpf(x0)
        if x0 <= 0:
            raise DomainError("expansion point must be positive")
        r = mp.mpf("0.45") * x0
        m_pts = 64
        samples = []
        for k in range(m_pts):
            z = x0 + r * mp.e ** (2j * mp.pi * k / m_pts)
            samples.append(phi_hat(geom, z, prec))
        out = []
        fact = mp.mpf(1)
        for j in range(j_max + 1):
            acc = mp.mpc(0)
            for k in range(m_pts):
                acc += samples[k] * mp.e ** (-2j * mp.pi * j * k / m_pts)
            coeff = acc / m_pts / r**j
            if j:
                fact *= j
            out.append(mp.re(coeff) * fact)
        return out


def _check_top_coefficient(geom: CapGeometry, c_list: list, prec: Precision) -> None:
    """Guard: refit c_{d+1} from plain samples of phi_hat; a gross mismatch
    against the exact polynomial route raises DifferentiationUnstable."""
    d = geom.d
    with mp.workdps(prec.working_digits + 15):
        n_unk = d + 2  # c_2 .. c_{d+3}
        ys = [mp.mpf("0.02") * (i + 1) for i in range(n_unk)]
        rows = []
        rhs = []
        for y in ys:
            rows.append([y ** (2 + t) for t in range(n_unk)])
            rhs.append(phi_hat(geom, y, prec))
        sol = mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))
        fitted = sol[d - 1]  # c_{d+1}
        exact = c_list[d + 1]
        scale = 1 + max(abs(c) for c in c_list)
        if abs(fitted - exact) > mp.mpf("1e-2") * scale:
            raise DifferentiationUnstable(
                "sampled c_%d=%s disagrees with exact %s" % (d + 1, fitted, exact)
            )


def pf_integral_phi(geom: CapGeometry, prec: Precision | None = None, xi=Fraction(1, 2)):
    """Partie finie of int_0^inf phi(x) dx, plus the matching pole residue.

    In y = 1/mu the integral is int_0^Y y^(-d-2) phi_hat dy with Y = 2/(d-1);
    the finite part subtracts the exact polynomial jet below a free cutoff
    xi (the result is xi-independent, which the tests exercise).
    Returns (finite_part, pole_coeff) with pole_coeff = c_{d+1}/2.
    """
    prec = _resolve(prec)
    d = geom.d
    guard = 18 + 4 * d
    with mp.workdps(prec.working_digits + guard):
        xi_f = _as_mpf(xi)
        if xi_f <= 0:
            raise DomainError("cutoff must be positive")
        y_top = mp.mpf(2) / (d - 1)
        cs = phi_hat_taylor(geom, d + 1, prec)
        _check_top_coefficient(geom, cs, prec)
        wd2 = prec.working_digits + guard - 10
        hi_prec = Precision(wd2, 10.0 ** (9 - wd2))

        def jet(y):
            acc = mp.mpf(0)
            for j in range(2, d + 2):
                acc += cs[j] * y**j
            return acc

        def low(y):
            return (phi_hat(geom, y, hi_prec) - jet(y)) * y ** (-d - 2)

        def mid(y):
            return phi_hat(geom, y, hi_prec) * y ** (-d - 2)

        try:
            part_a = mp.quad(low, [0, xi_f], method="gauss-legendre")
            part_b = mp.quad(mid, [xi_f, y_top], method="gauss-legendre") if xi_f != y_top else mp.mpf(0)
        except mp.NoConvergence as exc:  # pragma: no cover - defensive
            raise QuadratureFailure("partie-finie quadrature failed: %s" % exc) from exc
        tail = mp.mpf(0)
        for j in range(2, d + 1):
            tail += cs[j] * xi_f ** (j - d - 1) / (j - d - 1)
        tail += cs[d + 1] * mp.log(xi_f)
        return part_a + part_b + tail, cs[d + 1] / 2


# ---------------------------------------------------------------------------
# Abel-Plana boundary integral


def abel_plana_of(f, prec: Precision | None = None, upper=None):
    """-2 int_0^inf Im f(ix) / (e^(2 pi x) - 1) dx for f real on the axis."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        if upper is None:
            upper = (prec.working_digits + 12) * mp.log(10) / (2 * mp.pi) + 2

        def integrand(x):
            return mp.im(f(1j * x)) / mp.expm1(2 * mp.pi * x)

        try:
            val = mp.quad(integrand, [0, mp.mpf(1) / 2, 2, 8, upper],
                          method="gauss-legendre")
        except mp.NoConvergence as exc:  # pragma: no cover - defensive
            raise QuadratureFailure("Abel-Plana quadrature failed: %s" % exc) from exc
        return -2 * val


def abel_plana_tail(geom: CapGeometry, prec: Precision | None = None):
    """Abel-Plana correction applied to the spectral side function phi."""
    prec = _resolve(prec)
    if geom.sigma == mp.mpf(1) / 2:
        return mp.mpf(0)  # 2F1 is identically 1: phi vanishes on the axis
    return abel_plana_of(lambda z: phi_of_x(geom, z, prec), prec)


# ---------------------------------------------------------------------------
# nonlocal integrals over the uniform variable


def nonlocal_integral(n: int, geom: CapGeometry, prec: Precision | None = None):
    """NL_n = int_0^inf ln v d a_n(v), v = u^2, by split quadrature.

    Head and tail substitute v = x^2 and v = 1/z^2 so both integrands stay
    smooth; the profile must approach its v = 0 limit (QuadratureFailure
    otherwise) and decay at v = infinity.
    """
    prec = _resolve(prec)
    th, s2 = geom.theta0, geom.sigma**2
    with mp.workdps(prec.working_digits + 10):
        a0 = a_tilde_at_zero(n, th, s2, prec)
        r4 = a_tilde(n, mp.mpf("1e-4"), th, s2, prec) - a0
        r6 = a_tilde(n, mp.mpf("1e-6"), th, s2, prec) - a0
        floor = (1 + abs(a0)) * mp.mpf(10) ** (-(prec.working_digits - 8))
        if abs(r6) > max(abs(r4) / 2, floor):
            raise QuadratureFailure(
                "a_%d(v) does not settle to its v=0 limit: ln v weight not integrable" % n
            )

        def head(x):
            return 2 * (a_tilde(n, x * x, th, s2, prec) - a0) / x

        def tail(z):
            return 2 * a_tilde(n, 1 / (z * z), th, s2, prec) / z

        try:
            h = mp.quad(head, [0, 1], method="gauss-legendre")
            t = mp.quad(tail, [0, 1], method="gauss-legendre")
        except mp.NoConvergence as exc:  # pragma: no cover - defensive
            raise QuadratureFailure("nonlocal quadrature failed: %s" % exc) from exc
        return -h - t


# ---------------------------------------------------------------------------
# assembled pieces of the derivative at zero


def g_r_log(d: int) -> Fraction:
    """Coefficient of the log term in the regular part: exact rational."""
    return -(base_zeta_exact(d, Fraction(0)) + 2 * base_zeta_exact(d, Fraction(-1, 2))) / 4


def g_p_log(d: int) -> Fraction:
    """Phase part carries no log term: identically zero by parity."""
    return Fraction(0)


def g_p_reg(d: int) -> Fraction:
    """Phase part carries no scheme constant either."""
    return Fraction(0)


def g_r_reg(geom: CapGeometry, prec: Precision | None = None):
    """Scheme constant of the regular part: -(1/2) zeta_N(0) ln(2 pi sin theta0)."""
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        z0 = _as_mpf(base_zeta_exact(geom.d, Fraction(0)))
        return -z0 / 2 * mp.log(2 * mp.pi * mp.sin(geom.theta0))


def g_p_zero(geom: CapGeometry, prec: Precision | None = None):
    """sum_n Res_n a_n(u=0): the phase part's value at the origin."""
    prec = _resolve(prec)
    d = geom.d
    with mp.workdps(prec.working_digits + 10):
        s2 = geom.sigma**2
        s_val = geom.s_half
        limits = limit_cumulants_s(d)
        acc = mp.mpf(0)
        for n_pole in range(1, d + 1):
            res = base_zeta_residue(d, n_pole)
            if res:
                acc += _as_mpf(res) * eval_sigma_s_poly(limits[n_pole - 1], s2, s_val, prec)
        return acc


def curly_g_p(geom: CapGeometry, u, prec: Precision | None = None):
    """sum_n Res_n a_n(nu(u)): the phase profile at uniform ratio u."""
    prec = _resolve(prec)
    d = geom.d
    with mp.workdps(prec.working_digits + 10):
        u_f = _as_mpf(u)
        if u_f == 0:
            return g_p_zero(geom, prec)
        s2 = geom.sigma**2
        acc = mp.mpf(0)
        needed = [n for n in range(1, d + 1) if base_zeta_residue(d, n)]
        if not needed:
            return acc
        low = cumulant_values(u_f, geom.theta0, s2, min(2, max(needed)), prec)
        high = None
        if max(needed) >= 3:
            high = coefficients_by_extraction(u_f, geom.theta0, s2, prec,
                                              n_lo=3, n_hi=max(8, max(needed)))
        for n_pole in needed:
            res = _as_mpf(base_zeta_residue(d, n_pole))
            val = low[n_pole - 1] if n_pole <= 2 else high[n_pole]
            acc += res * val
        return acc


def pf_lambda0(d: int, prec: Precision | None = None):
    """Finite part at s = 0 of the full downward continuation.

    zeta'_{N+1}(0) + (1/4) zeta'_N(0) + (1/2) zeta'_N(-1/2) + zeta_N(-1/2)
    + 2 sum_n C_n H_{n-1} Res_n.
    """
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        acc = next_zeta_deriv0(d, prec)
        acc += base_zeta_deriv(d, 0, prec) / 4
        acc += base_zeta_deriv(d, Fraction(-1, 2), prec) / 2
        acc += _as_mpf(base_zeta_exact(d, Fraction(-1, 2)))
        acc += 2 * _as_mpf(harmonic_cumulant_residue_sum(d))
        return acc


def g_r_zero(geom: CapGeometry, prec: Precision | None = None):
    """Regular part's value at the origin of the continuation variable."""
    prec = _resolve(prec)
    d = geom.d
    with mp.workdps(prec.working_digits + 10):
        th = geom.theta0
        acc = _as_mpf(base_zeta_exact(d, Fraction(-1, 2))) * mp.log(mp.tan(th / 2))
        acc -= _as_mpf(base_zeta_exact(d, Fraction(0))) / 2 * mp.log(2 * mp.pi)
        acc -= next_zeta_deriv0(d, prec)
        acc -= 2 * _as_mpf(harmonic_cumulant_residue_sum(d))
        pf_phi, _ = pf_integral_phi(geom, prec)
        acc += pf_phi
        acc += abel_plana_tail(geom, prec)
        acc += phi_of_x(geom, 0, prec) / 2
        return acc


def pole_balance_polys(d: int):
    """Both sides of the pole-bookkeeping identity as exact polynomials.

    Returns (sum_n Res_n (a_n - C_n), c_{d+1}/2) in the (sigma^2, S) ring;
    the two dicts must be equal.
    """
    limits = limit_cumulants_s(d)
    lhs: dict = {}
    for n in range(1, d + 1):
        res = base_zeta_residue(d, n)
        if not res:
            continue
        poly = dict(limits[n - 1])
        c = bernoulli_cumulant(n)
        if c:
            poly = _pns_add(poly, {(0, 0): -c})
        lhs = _pns_add(lhs, _pns_scale(poly, res))
    rhs = _pns_scale(_phi_hat_taylor_polys(d, d + 1)[d + 1], Fraction(1, 2))
    return lhs, rhs
