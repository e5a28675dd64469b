"""Conformally coupled caps: theta0-independent zeta(0), varying ln det.

At sigma = 1/2 the zeta(0) invariant of every cap dimension collapses to a
single rational constant (-1/48, -1/180, 17/11520 for D = 3, 4, 5) no matter
the opening angle, while zeta'(0) -- and with it the determinant -- still
feels the geometry.  Run:

    python3 demos/conformal_cap.py
"""

from fractions import Fraction

from mpmath import mp

from zetacap import Precision, logdet

PREC = Precision(40, 1e-30)
CONSTANTS = {2: Fraction(-1, 48), 3: Fraction(-1, 180), 4: Fraction(17, 11520)}


def main() -> None:
    with mp.workdps(50):
        half = mp.mpf(1) / 2
        for d, const in CONSTANTS.items():
            print("cap dimension D = %d (base sphere d = %d); "
                  "expected zeta(0) = %s" % (d + 1, d, const))
            print("  theta0      zeta(0) - const   zeta'(0)        ln det")
            for theta in (mp.mpf("0.4"), mp.mpf(1), mp.pi / 2, mp.mpf("2.4")):
                inv = logdet(d, half, theta, 1, PREC)
                drift = inv.zeta0 - mp.mpf(const.numerator) / const.denominator
                print("  %-10s  %-16s  %-14s  %s"
                      % (mp.nstr(theta, 4), mp.nstr(drift, 3),
                         mp.nstr(inv.zeta_prime0, 8), mp.nstr(inv.logdet, 8)))
            print()


if __name__ == "__main__":
    main()
