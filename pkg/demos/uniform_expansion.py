"""Watching the uniform expansion earn its error bars.

The analytic continuation rests on a large-order expansion of the Ferrers
function logarithm that is uniform in u = w/mu.  Its order-N remainder must
shrink like mu^-(N+1) uniformly over the whole u range -- doubling mu at
order 4 should buy a factor of about 2^5 = 32.  This script measures the
max-over-u remainder envelope against an independent evaluator and prints
the observed factors.

Run (about half a minute):

    python3 demos/uniform_expansion.py
"""

from mpmath import mp

from zetacap import Precision
from zetacap.asympt import log_p_uniform
from zetacap.specfun import log_ferrers_w2

PREC = Precision(40, 1e-30)


def envelope(mu, order, n_pts=24):
    theta = 2 * mp.pi / 5
    sigma2 = mp.mpf("1.69")
    worst = mp.mpf(0)
    for i in range(n_pts):
        u = mp.mpf(10) ** (-2 + mp.mpf(4) * i / (n_pts - 1))
        truth = log_ferrers_w2(mu, sigma2 - (u * mu) ** 2, theta, PREC)
        approx = log_p_uniform(mu, u, theta, sigma2, order, PREC)
        worst = max(worst, abs(approx - truth))
    return worst


def main() -> None:
    with mp.workdps(50):
        print("max |order-N expansion - direct evaluation| over u in [0.01, 100]")
        print("(d = 2 parameters: theta0 = 2 pi / 5, sigma = 1.3)\n")
        for order in (2, 4):
            envs = {m: envelope(mp.mpf(m), order) for m in (10, 20, 40)}
            print("order N = %d   expected shrink factor ~ 2^%d = %d"
                  % (order, order + 1, 2 ** (order + 1)))
            for m, e in envs.items():
                print("  mu = %-3d  envelope = %s" % (m, mp.nstr(e, 4)))
            print("  factors: %s, %s\n"
                  % (mp.nstr(envs[10] / envs[20], 5), mp.nstr(envs[20] / envs[40], 5)))


if __name__ == "__main__":
    main()
