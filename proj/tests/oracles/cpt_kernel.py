"""Independent quadrature values frozen into the unit tests.

Run with: python3 tests/oracles/cpt_kernel.py
"""
import numpy as np
from scipy import integrate


def g(x):
    return x - 1.0 + np.exp(-x)


def kernel(g1, gd2, cross, gam, tau):
    """F(tau) by direct nested quadrature of the triple-integral form.

    gd2 = |q1|^2 v^2, cross = q1.q2 v^2.
    """
    et = np.exp(-gam * tau)

    def inner(t1):
        a = np.exp(-g1 * t1 - gd2 / gam**2 * (gam * t1 - et + et * np.exp(-gam * t1)))
        f = lambda t3: np.exp(cross * (et - 1.0) * (np.exp(-gam * t1) * np.exp(gam * t3)
                                                    + np.exp(-gam * t3) - 2.0) / gam**2)
        return a * integrate.quad(f, 0.0, t1, epsabs=0, epsrel=1e-12, limit=200)[0]

    top = 60.0 / g1
    pts = [min(top, x) for x in (0.1 / np.sqrt(gd2 + 1e-300), 1.0 / g1, 5.0 / g1)]
    return integrate.quad(inner, 0.0, top, points=sorted(set(pts)), epsabs=0,
                          epsrel=1e-11, limit=500)[0]


def cross_integral(gam, tau, tau1, tau3):
    """int int exp(-gam |s2 - s1|) over s1 in [t - tau1 - tau, t], s2 in
    [t - tau3 - tau, t - tau3] (t = 0). Inner integral in closed form, outer
    split at the kinks; dblquad loses ~1e-8 on the |s2 - s1| cusp."""
    import mpmath as mp
    mp.mp.dps = 30
    a, b = -tau3 - tau, -tau3

    def inner(s1):
        if s1 <= a:
            return (mp.exp(-gam * (a - s1)) - mp.exp(-gam * (b - s1))) / gam
        if s1 >= b:
            return (mp.exp(-gam * (s1 - b)) - mp.exp(-gam * (s1 - a))) / gam
        return (2 - mp.exp(-gam * (s1 - a)) - mp.exp(-gam * (b - s1))) / gam

    lo = -tau1 - tau
    pts = sorted({lo, 0.0} | {x for x in (a, b) if lo < x < 0.0})
    return float(mp.quad(inner, pts))


if __name__ == "__main__":
    # orthogonal beams: Gamma1 = 2, |q1| v = 3, gamma = 1.5
    for tau in (0.0, 0.7, 5.0):
        print("orthogonal", tau, repr(kernel(2.0, 9.0, 0.0, 1.5, tau)))
    # oblique beams: Gamma1 = 2, |q1| v = 3, q1.q2 v^2 = 4, gamma = 1.5
    for tau in (0.0, 0.7, 5.0):
        print("oblique", tau, repr(kernel(2.0, 9.0, 4.0, 1.5, tau)))
    for args in ((1.0, 0.5, 1.2, 0.3), (3.0, 2.0, 0.4, 0.1), (0.2, 1.0, 1.0, 1.0)):
        print("cross", args, repr(cross_integral(*args)))
