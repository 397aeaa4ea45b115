"""Independent reference values for the tests.

Nothing here imports the package: integrals come from mpmath (tanh-sinh)
or QUADPACK, special functions from mpmath, kernels from textbook formulas.
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate

mp.mp.dps = 30


def quad(f, a, b, **kw):
    """Adaptive Gauss-Kronrod (QUADPACK) with tight tolerances."""
    val, _ = integrate.quad(f, a, b, epsabs=kw.pop("epsabs", 1e-14), epsrel=kw.pop("epsrel", 1e-13), limit=kw.pop("limit", 400), **kw)
    return val


def mpquad(f, a, b):
    return float(mp.quad(f, [a, b]))


def fd1(f, x, h=1e-4):
    """Fourth-order central first derivative."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def fd2(f, x, h=1e-3):
    """Fourth-order central second derivative."""
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)


def hermite_function(k, x):
    """Normalised Hermite function via mpmath."""
    x = mp.mpf(x)
    return float(mp.hermite(k, x) * mp.exp(-x * x / 2) / mp.sqrt(2**k * mp.factorial(k) * mp.sqrt(mp.pi)))


def laguerre(k, alpha, x):
    return float(mp.laguerre(k, alpha, x))


def psi(k, alpha, r):
    r = mp.mpf(r)
    c = mp.sqrt(2 * mp.gamma(k + 1) / mp.gamma(k + alpha + 1))
    return float(c * mp.laguerre(k, alpha, r * r) * mp.exp(-r * r / 2))


def phi_small(k, delta, r):
    r = mp.mpf(r)
    c = mp.sqrt(mp.gamma(k + 1) * mp.mpf(2) ** (-delta) / mp.gamma(k + delta + 1))
    return float(c * mp.laguerre(k, delta, r * r / 2) * mp.exp(-r * r / 4))


def besseli(alpha, x):
    return float(mp.besseli(alpha, x))


def mehler(t, x, y):
    """Mehler kernel on R^d from the Hermite-function series summed in mpmath (d = len(x))."""
    x, y = np.atleast_1d(x), np.atleast_1d(y)
    val = mp.mpf(1)
    for a, b in zip(x, y):
        s = mp.nsum(lambda k: mp.exp(-(2 * k + 1) * t) * _hf(int(k), a) * _hf(int(k), b), [0, mp.inf])
        val *= s
    return float(val)


def _hf(k, x):
    x = mp.mpf(x)
    return mp.hermite(k, x) * mp.exp(-x * x / 2) / mp.sqrt(2**k * mp.factorial(k) * mp.sqrt(mp.pi))


def laguerre_heat(t, r, s, alpha):
    """Laguerre heat kernel from the Bessel closed form in mpmath."""
    t, r, s = mp.mpf(t), mp.mpf(r), mp.mpf(s)
    sh = mp.sinh(2 * t)
    return float(mp.exp(-(r * r + s * s) / (2 * mp.tanh(2 * t))) * (r * s) ** (-alpha) * mp.besseli(alpha, r * s / sh) / sh)


def special_heat_series(t, rho, d, kmax=200):
    """``(2 pi)^{-d} sum_k exp(-(2k+d)t) L_k^{d-1}(rho^2/2) exp(-rho^2/4)`` in mpmath."""
    rho = mp.mpf(rho)
    tot = mp.mpf(0)
    for k in range(kmax):
        tot += mp.exp(-(2 * k + d) * t) * mp.laguerre(k, d - 1, rho * rho / 2)
    return float(tot * mp.exp(-rho * rho / 4) / (2 * mp.pi) ** d)


def sphere_monomial_integral(exps):
    """Exact ``int_{S^{d-1}} x^a dsigma`` for a multi-exponent ``a``."""
    if any(e % 2 for e in exps):
        return 0.0
    b = [(e + 1) / 2 for e in exps]
    return 2 * math.exp(sum(math.lgamma(v) for v in b) - math.lgamma(sum(b)))


def sphere_area(d):
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)
