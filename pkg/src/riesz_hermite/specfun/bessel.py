"""Modified Bessel function of the first kind, I_alpha, for real order alpha >= -1/2.

Two routes overlap around the split point ``x = 20``: the ascending power
series (all terms positive, summed in log space) and the large-argument
expansion ``I_a(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(alpha) / x^k``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = ["SERIES_SPLIT", "bessel_i", "bessel_i_scaled"]

SERIES_SPLIT = 20.0
_SERIES_TERMS = 120
_ASYMPTOTIC_TERMS = 60


def _check(alpha, x):
    if alpha < -0.5:
        raise ValueError("alpha must be >= -1/2")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be non-negative")
    return x


def _log_series(alpha, x):
    """log I_alpha(x) from the power series, x > 0."""
    k = np.arange(_SERIES_TERMS)
    lx = np.log(0.5 * x)[..., None]
    terms = (2 * k + alpha) * lx - gammaln(k + 1) - gammaln(k + alpha + 1)
    return logsumexp(terms, axis=-1)


def _scaled_asymptotic(alpha, x):
    """e^{-x} I_alpha(x) from the large-argument expansion.

    Summation stops at the smallest term (optimal truncation); for
    half-integer alpha the series terminates and is exact.
    """
    mu = 4.0 * alpha * alpha
    total = np.ones_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = term * (-(mu - (2 * k - 1) ** 2) / (8.0 * k * x))
        mag = np.abs(term)
        active &= mag < prev
        total = np.where(active, total + term, total)
        prev = np.where(active, mag, prev)
        if not np.any(active & (mag > 1e-18 * np.abs(total))):
            break
    return total / np.sqrt(2.0 * math.pi * x)


def bessel_i_scaled(alpha, x, route="auto"):
    """``exp(-x) I_alpha(x)``; never overflows.

    ``route`` is ``"auto"`` (series below the split, asymptotic above),
    ``"series"`` or ``"asymptotic"``.
    """
    x = _check(alpha, x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    zero = x == 0
    if np.any(zero):
        out[zero] = 1.0 if alpha == 0 else (0.0 if alpha > 0 else np.inf)
    pos = ~zero
    if route == "auto":
        small = pos & (x < SERIES_SPLIT)
        large = pos & ~small
    elif route == "series":
        small, large = pos, np.zeros_like(pos)
    elif route == "asymptotic":
        small, large = np.zeros_like(pos), pos
    else:
        raise ValueError(f"unknown route {route!r}")
    if np.any(small):
        out[small] = np.exp(_log_series(alpha, x[small]) - x[small])
    if np.any(large):
        out[large] = _scaled_asymptotic(alpha, x[large])
    return out[0] if scalar else out


def bessel_i(alpha, x, route="auto"):
    """``I_alpha(x)``; raises OverflowError when the value is not representable."""
    x = _check(alpha, x)
    if np.any(x > 709.0):
        raise OverflowError("I_alpha(x) overflows double precision; use bessel_i_scaled")
    return bessel_i_scaled(alpha, x, route) * np.exp(x)
