"""Spectral zeta function of the cross-section sphere.

The transverse spectrum on the unit d-sphere enters through degeneracies
d(k), a polynomial in the shifted index mu = k + (d-1)/2 with exact rational
coefficients b_alpha. Everything else - values, residues, finite parts,
derivatives, the cumulative (d+1)-tower zeta, heat-kernel coefficients -
reduces to Hurwitz zeta data at those shifts.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .errors import DomainError, PoleHit, UnsupportedDimension
from .specfun import (
    Precision,
    _as_mpf,
    _resolve,
    digamma_int_or_half,
    harmonic_number,
    hurwitz_zeta,
    hurwitz_zeta_deriv_at_neg,
    hurwitz_zeta_exact_nonpos,
    zeta_deriv_em,
)
from .asympt import bernoulli_cumulant

__all__ = [
    "degeneracy",
    "mu_b_alpha",
    "mu_e_alpha",
    "base_zeta",
    "base_zeta_exact",
    "base_zeta_residue",
    "base_zeta_pf",
    "base_zeta_deriv",
    "base_zeta_pf_and_deriv",
    "next_zeta",
    "next_zeta_exact0",
    "next_zeta_deriv0",
    "d_coefficient",
    "heat_coefficient",
    "cumulant_residue_sum",
    "harmonic_cumulant_residue_sum",
    "BaseSpectralData",
    "compute_base_data",
    "load_or_compute_base_data",
]

CACHE_ENV_VAR = "ZETACAP_CACHE_DIR"


def _check_d(d: int) -> None:
    if not isinstance(d, int) or not 2 <= d <= 8:
        raise UnsupportedDimension("base dimension d=%r outside [2, 8]" % (d,))


def degeneracy(d: int, k: int) -> Fraction:
    """Multiplicity of the k-th transverse level on the unit d-sphere."""
    _check_d(d)
    if k < 0:
        raise DomainError("level index must be nonnegative")
    mu = Fraction(2 * k + d - 1, 2)
    acc = 2 * mu
    for i in range(1, d - 1):
        acc *= mu + Fraction(2 * i - d + 1, 2)
    fact = 1
    for i in range(2, d):
        fact *= i
    return acc / fact


def mu_b_alpha(d: int) -> dict[int, Fraction]:
    """Exact coefficients of the degeneracy polynomial sum b_alpha mu^alpha."""
    _check_d(d)
    # convolution of the linear factors 2*mu * prod (mu + shift_i) / (d-1)!
    poly = {1: Fraction(2)}
    for i in range(1, d - 1):
        shift = Fraction(2 * i - d + 1, 2)
        nxt: dict[int, Fraction] = {}
        for a, c in poly.items():
            nxt[a + 1] = nxt.get(a + 1, Fraction(0)) + c
            if shift:
                nxt[a] = nxt.get(a, Fraction(0)) + c * shift
        poly = nxt
    fact = 1
    for i in range(2, d):
        fact *= i
    return {a: c / fact for a, c in poly.items() if c}


def mu_e_alpha(d: int) -> dict[int, Fraction]:
    """Cumulative-count polynomial: sum_{k<=m} d(k) = sum e_alpha y^alpha
    with y = m + (d+1)/2."""
    _check_d(d)
    # (2m+d) (m+d-1)! / (m! d!) as a polynomial in m
    poly = {1: Fraction(2), 0: Fraction(d)}
    for j in range(1, d):
        nxt: dict[int, Fraction] = {}
        for a, c in poly.items():
            nxt[a + 1] = nxt.get(a + 1, Fraction(0)) + c
            nxt[a] = nxt.get(a, Fraction(0)) + c * j
        poly = nxt
    fact = 1
    for i in range(2, d + 1):
        fact *= i
    poly = {a: c / fact for a, c in poly.items()}
    # substitute m = y - (d+1)/2
    shift = Fraction(d + 1, 2)
    out: dict[int, Fraction] = {}
    for a, c in poly.items():
        binom = 1
        for t in range(a + 1):
            key = a - t
            out[key] = out.get(key, Fraction(0)) + c * binom * (-shift) ** t
            binom = binom * (a - t) // (t + 1)
    return {a: c for a, c in out.items() if c}


def _base_index(d: int) -> Fraction:
    return Fraction(d - 1, 2)


def base_zeta(d: int, s, prec: Precision | None = None):
    """Transverse zeta sum_k d(k) mu_k^(-2s); PoleHit at s = n/2 with
    nonvanishing b_{n-1}."""
    _check_d(d)
    prec = _resolve(prec)
    b = mu_b_alpha(d)
    with mp.workdps(prec.working_digits + 10):
        s_f = _as_mpf(s)
        a = _base_index(d)
        acc = mp.mpf(0)
        for alpha, c in b.items():
            arg = 2 * s_f - alpha
            if abs(arg - 1) < mp.mpf(10) ** (-30):
                raise PoleHit("base zeta pole at s = %s (alpha = %d)" % (s, alpha))
            acc += _as_mpf(c) * hurwitz_zeta(arg, a, prec)
        return acc


def base_zeta_exact(d: int, s: Fraction) -> Fraction:
    """Exact rational value at s <= 1/2 with 2s integer (away from poles)."""
    _check_d(d)
    s = Fraction(s)
    if (2 * s).denominator != 1 or s > Fraction(1, 2):
        raise DomainError("exact base zeta needs 2s integer with s <= 1/2")
    a = _base_index(d)
    acc = Fraction(0)
    for alpha, c in mu_b_alpha(d).items():
        n = alpha - int(2 * s)  # zeta_H(2s - alpha) = zeta_H(-n)
        if n < 0:
            raise DomainError("argument not in the exact range")
        acc += c * hurwitz_zeta_exact_nonpos(n, a)
    return acc


def base_zeta_residue(d: int, n: int) -> Fraction:
    """Residue of base_zeta at s = n/2 (zero when there is no pole)."""
    _check_d(d)
    if n < 1:
        raise DomainError("pole index starts at 1")
    return mu_b_alpha(d).get(n - 1, Fraction(0)) / 2


def base_zeta_pf(d: int, n: int, prec: Precision | None = None):
    """Finite part of base_zeta at s = n/2; the plain value when regular."""
    _check_d(d)
    prec = _resolve(prec)
    b = mu_b_alpha(d)
    a = _base_index(d)
    with mp.workdps(prec.working_digits + 10):
        acc = mp.mpf(0)
        if n - 1 in b:
            acc -= _as_mpf(b[n - 1]) * digamma_int_or_half(a, prec)
        for alpha, c in b.items():
            if alpha == n - 1:
                continue
            acc += _as_mpf(c) * hurwitz_zeta(n - alpha, a, prec)
        return acc


def base_zeta_deriv(d: int, s, prec: Precision | None = None):
    """d/ds of base_zeta at a regular point.

    When 2s is a nonpositive-side integer the Hurwitz derivatives reduce to
    Riemann data; elsewhere the differentiated Euler-Maclaurin sum is used.
    Both routes agree and are cross-checked in the tests.
    """
    _check_d(d)
    prec = _resolve(prec)
    b = mu_b_alpha(d)
    a = _base_index(d)
    with mp.workdps(prec.working_digits + 10):
        s_f = _as_mpf(s)
        two_s = 2 * s_f
        acc = mp.mpf(0)
        reducible = mp.isint(two_s) and all(two_s - alpha <= 0 for alpha in b)
        for alpha, c in b.items():
            arg = two_s - alpha
            if abs(arg - 1) < mp.mpf(10) ** (-30):
                raise PoleHit("derivative requested at a pole of base zeta")
            if reducible:
                term = hurwitz_zeta_deriv_at_neg(int(-arg), d - 2, prec)
            else:
                term = zeta_deriv_em(arg, a, prec)
            acc += 2 * _as_mpf(c) * term
        return acc


def base_zeta_pf_and_deriv(d: int, s, prec: Precision | None = None):
    """(finite part, s-slope) at any s = n/2; at a pole the slope is the
    linear Laurent coefficient, extracted numerically."""
    _check_d(d)
    prec = _resolve(prec)
    with mp.workdps(2 * prec.working_digits):
        s_f = _as_mpf(s)
        n = int(mp.nint(2 * s_f))
        at_half_grid = abs(2 * s_f - n) < mp.mpf(10) ** (-30)
        res = base_zeta_residue(d, n) if (at_half_grid and n >= 1) else Fraction(0)
        if res == 0:
            return base_zeta(d, s_f, prec), base_zeta_deriv(d, s_f, prec)
        dbl = prec.doubled()
        pf = base_zeta_pf(d, n, prec)
        eps = mp.mpf(10) ** (-prec.working_digits // 3)
        r = _as_mpf(res)
        up = base_zeta(d, s_f + eps, dbl)
        dn = base_zeta(d, s_f - eps, dbl)
        c1 = (up - dn - 2 * r / eps) / (2 * eps)
        return pf, c1


# ---------------------------------------------------------------------------
# cumulative tower: zeta over y = m + (d+1)/2 weighted by partial sums


def next_zeta(d: int, s, prec: Precision | None = None):
    _check_d(d)
    prec = _resolve(prec)
    e = mu_e_alpha(d)
    a = Fraction(d + 1, 2)
    with mp.workdps(prec.working_digits + 10):
        s_f = _as_mpf(s)
        acc = mp.mpf(0)
        for alpha, c in e.items():
            arg = s_f - alpha
            if abs(arg - 1) < mp.mpf(10) ** (-30):
                raise PoleHit("cumulative tower zeta pole at s = %s" % (s,))
            acc += _as_mpf(c) * hurwitz_zeta(arg, a, prec)
        return acc


def next_zeta_exact0(d: int) -> Fraction:
    acc = Fraction(0)
    a = Fraction(d + 1, 2)
    for alpha, c in mu_e_alpha(d).items():
        acc += c * hurwitz_zeta_exact_nonpos(alpha, a)
    return acc


def next_zeta_deriv0(d: int, prec: Precision | None = None):
    """d/ds at 0 of the cumulative tower zeta, via the Hurwitz reductions."""
    _check_d(d)
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        acc = mp.mpf(0)
        for alpha, c in mu_e_alpha(d).items():
            acc += _as_mpf(c) * hurwitz_zeta_deriv_at_neg(alpha, d, prec)
        return acc


# ---------------------------------------------------------------------------
# heat-kernel route: independent exact cross-checks


def d_coefficient(d: int, j: int) -> Fraction:
    """D_j = j! [y^j] (y / sinh y)^(d-1), exact."""
    _check_d(d)
    if j < 0:
        raise DomainError("coefficient index must be nonnegative")
    half = j // 2 + 1
    # sinh(y)/y in the y^2 grading
    c = [Fraction(1)]
    fact = 1
    for k in range(1, half + 1):
        fact *= (2 * k) * (2 * k + 1)
        c.append(Fraction(1, fact))
    # reciprocal series
    r = [Fraction(1)] + [Fraction(0)] * half
    for k in range(1, half + 1):
        r[k] = -sum(c[i] * r[k - i] for i in range(1, k + 1))
    # (d-1)-th power
    p = [Fraction(1)] + [Fraction(0)] * half
    for _ in range(d - 1):
        nxt = [Fraction(0)] * (half + 1)
        for i in range(half + 1):
            if p[i]:
                for k in range(half + 1 - i):
                    nxt[i + k] += p[i] * r[k]
        p = nxt
    if j % 2:
        return Fraction(0)
    fact = 1
    for i in range(2, j + 1):
        fact *= i
    return p[j // 2] * fact


def heat_coefficient(d: int, k: int) -> Fraction:
    """Small-time heat-trace coefficient of the transverse tower, exact."""
    _check_d(d)
    if k < 0:
        raise DomainError("heat index must be nonnegative")
    if k < d:
        fact = 1
        for i in range(2, d - k):
            fact *= i
        return 2 * fact * base_zeta_residue(d, d - k)
    sign = Fraction(-1) ** (k - d)
    fact = 1
    for i in range(2, k - d + 1):
        fact *= i
    return sign / fact * base_zeta_exact(d, Fraction(d - k, 2))


def cumulant_residue_sum(d: int) -> Fraction:
    """sum_n C_n Res_n over the pole ladder, exact."""
    acc = Fraction(0)
    for n in range(1, d + 1):
        acc += bernoulli_cumulant(n) * base_zeta_residue(d, n)
    return acc


def harmonic_cumulant_residue_sum(d: int) -> Fraction:
    """sum_n C_n H_{n-1} Res_n, exact."""
    acc = Fraction(0)
    for n in range(1, d + 1):
        acc += bernoulli_cumulant(n) * harmonic_number(n - 1) * base_zeta_residue(d, n)
    return acc


# ---------------------------------------------------------------------------
# cached bundle of the d-dependent constants


@dataclass(frozen=True)
class BaseSpectralData:
    d: int
    working_digits: int
    b_alpha: dict
    e_alpha: dict
    residues: dict          # n -> Fraction
    zeta0: Fraction
    zeta_mhalf: Fraction
    next_zeta0: Fraction
    pf: dict                # n -> mpf (finite parts at s = n/2, n = 1..d+1)
    deriv0: object
    deriv_mhalf: object
    next_deriv0: object


def compute_base_data(d: int, prec: Precision | None = None) -> BaseSpectralData:
    _check_d(d)
    prec = _resolve(prec)
    with mp.workdps(prec.working_digits + 10):
        return BaseSpectralData(
            d=d,
            working_digits=prec.working_digits,
            b_alpha=mu_b_alpha(d),
            e_alpha=mu_e_alpha(d),
            residues={n: base_zeta_residue(d, n) for n in range(1, d + 1)},
            zeta0=base_zeta_exact(d, Fraction(0)),
            zeta_mhalf=base_zeta_exact(d, Fraction(-1, 2)),
            next_zeta0=next_zeta_exact0(d),
            pf={n: base_zeta_pf(d, n, prec) for n in range(1, d + 2)},
            deriv0=base_zeta_deriv(d, 0, prec),
            deriv_mhalf=base_zeta_deriv(d, Fraction(-1, 2), prec),
            next_deriv0=next_zeta_deriv0(d, prec),
        )


def _frac_str(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator)


def _data_to_json(data: BaseSpectralData) -> dict:
    digits = data.working_digits + 5
    return {
        "d": data.d,
        "working_digits": data.working_digits,
        "b_alpha": {str(k): _frac_str(v) for k, v in data.b_alpha.items()},
        "e_alpha": {str(k): _frac_str(v) for k, v in data.e_alpha.items()},
        "residues": {str(k): _frac_str(v) for k, v in data.residues.items()},
        "zeta0": _frac_str(data.zeta0),
        "zeta_mhalf": _frac_str(data.zeta_mhalf),
        "next_zeta0": _frac_str(data.next_zeta0),
        "pf": {str(k): mp.nstr(v, digits) for k, v in data.pf.items()},
        "deriv0": mp.nstr(data.deriv0, digits),
        "deriv_mhalf": mp.nstr(data.deriv_mhalf, digits),
        "next_deriv0": mp.nstr(data.next_deriv0, digits),
    }


def _data_from_json(doc: dict) -> BaseSpectralData:
    with mp.workdps(doc["working_digits"] + 10):
        return BaseSpectralData(
            d=doc["d"],
            working_digits=doc["working_digits"],
            b_alpha={int(k): Fraction(v) for k, v in doc["b_alpha"].items()},
            e_alpha={int(k): Fraction(v) for k, v in doc["e_alpha"].items()},
            residues={int(k): Fraction(v) for k, v in doc["residues"].items()},
            zeta0=Fraction(doc["zeta0"]),
            zeta_mhalf=Fraction(doc["zeta_mhalf"]),
            next_zeta0=Fraction(doc["next_zeta0"]),
            pf={int(k): mp.mpf(v) for k, v in doc["pf"].items()},
            deriv0=mp.mpf(doc["deriv0"]),
            deriv_mhalf=mp.mpf(doc["deriv_mhalf"]),
            next_deriv0=mp.mpf(doc["next_deriv0"]),
        )


def load_or_compute_base_data(d: int, prec: Precision | None = None,
                              cache_dir: str | None = None) -> BaseSpectralData:
    """Bundle keyed on (d, working_digits), cached as JSON when a cache
    directory is configured (argument or ZETACAP_CACHE_DIR)."""
    prec = _resolve(prec)
    cache_dir = cache_dir or os.environ.get(CACHE_ENV_VAR)
    if not cache_dir:
        return compute_base_data(d, prec)
    path = os.path.join(cache_dir, "base_d%d_wd%d.json" % (d, prec.working_digits))
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            return _data_from_json(json.load(fh))
    data = compute_base_data(d, prec)
    os.makedirs(cache_dir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(_data_to_json(data), fh, indent=1, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return data
