"""Hermite functions, Laguerre polynomials and the normalised Laguerre families."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "LaguerreIndex",
    "MultiIndex",
    "gegenbauer_norm",
    "hermite_fn",
    "hermite_fn_deriv",
    "hermite_fn_multi",
    "hermite_fn_rodrigues",
    "hermite_fn_table",
    "laguerre_phi_fock",
    "laguerre_poly",
    "laguerre_poly_explicit",
    "laguerre_table",
    "multi_indices",
    "phi_small",
    "phi_small_table",
    "psi",
    "psi_deriv",
    "psi_table",
]

PI_QUARTER = math.pi ** -0.25


@dataclass(frozen=True, order=True)
class MultiIndex:
    entries: tuple

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if any(e < 0 for e in entries):
            raise ValueError(f"multi-index entries must be non-negative: {entries}")
        object.__setattr__(self, "entries", entries)

    @property
    def length(self):
        return len(self.entries)

    @property
    def order(self):
        return sum(self.entries)

    def shifted(self, j, step):
        e = list(self.entries)
        e[j] += step
        return MultiIndex(tuple(e))


@dataclass(frozen=True)
class LaguerreIndex:
    k: int
    alpha: float

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.alpha < -0.5:
            raise ValueError("alpha must be >= -1/2")

    @property
    def eigenvalue(self):
        return 4 * self.k + 2 * self.alpha + 2


def multi_indices(d, max_order):
    """All multi-indices of length d with |mu| <= max_order, graded lexicographic."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + [e], remaining - e, slots - 1)

    for total in range(max_order + 1):
        level = []
        out_len = len(out)
        rec([], total, d)
        # rec emits every index with sum <= total; keep the exact level
        level = [mu for mu in out[out_len:] if sum(mu) == total]
        del out[out_len:]
        out.extend(sorted(level, reverse=True))
    return out


def hermite_fn_table(kmax, x):
    """Rows ``h_0(x) .. h_kmax(x)`` of the L^2-normalised Hermite functions.

    Three-term recurrence
    ``h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = PI_QUARTER * np.exp(-0.5 * x * x)
    if kmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_fn(k, x):
    if k < 0:
        raise ValueError("k must be non-negative")
    return hermite_fn_table(k, x)[k]


def hermite_fn_deriv(k, x):
    """``h_k'(x) = sqrt(k/2) h_{k-1}(x) - sqrt((k+1)/2) h_{k+1}(x)``."""
    tab = hermite_fn_table(k + 1, x)
    lower = math.sqrt(k / 2.0) * tab[k - 1] if k > 0 else 0.0
    return lower - math.sqrt((k + 1) / 2.0) * tab[k + 1]


def hermite_fn_rodrigues(k, x):
    """Direct evaluation from the explicit sum for the physicists' H_k.

    ``H_k(x) = k! sum_m (-1)^m (2x)^{k-2m} / (m! (k-2m)!)``; independent of
    the recurrence used by :func:`hermite_fn`.
    """
    x = np.asarray(x, dtype=float)
    hk = np.zeros_like(x)
    for m in range(k // 2 + 1):
        hk = hk + (-1) ** m * math.exp(math.lgamma(k + 1) - math.lgamma(m + 1) - math.lgamma(k - 2 * m + 1)) * (2 * x) ** (k - 2 * m)
    norm = math.exp(-0.5 * (k * math.log(2.0) + math.lgamma(k + 1))) * PI_QUARTER
    return norm * hk * np.exp(-0.5 * x * x)


def hermite_fn_multi(mu, x):
    """Product ``prod_j h_{mu_j}(x_j)`` for points ``x`` of shape (..., d)."""
    entries = mu.entries if isinstance(mu, MultiIndex) else tuple(mu)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != len(entries):
        raise ValueError("point dimension does not match multi-index length")
    val = np.ones(x.shape[:-1])
    for j, k in enumerate(entries):
        val = val * hermite_fn(k, x[..., j])
    return val


def laguerre_table(kmax, alpha, x):
    """Rows ``L_0^alpha(x) .. L_kmax^alpha(x)`` by the three-term recurrence."""
    if alpha <= -1:
        raise ValueError("alpha must exceed -1")
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, kmax):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def laguerre_poly(k, alpha, x):
    if k < 0:
        raise ValueError("k must be non-negative")
    return laguerre_table(k, alpha, x)[k]


def laguerre_poly_explicit(k, alpha, x):
    """``sum_i (-1)^i binom(k+alpha, k-i) x^i / i!`` (for cross-checking only)."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for i in range(k + 1):
        logc = gammaln(k + alpha + 1) - gammaln(k - i + 1) - gammaln(alpha + i + 1) - gammaln(i + 1)
        total = total + (-1) ** i * math.exp(logc) * x**i
    return total


def _psi_norm(k, alpha):
    return math.exp(0.5 * (math.log(2.0) + gammaln(k + 1) - gammaln(k + alpha + 1)))


def psi_table(kmax, alpha, r):
    """Rows ``psi_k^alpha(r)``, orthonormal in L^2(R^+, r^{2 alpha + 1} dr)."""
    r = np.asarray(r, dtype=float)
    lag = laguerre_table(kmax, alpha, r * r)
    norms = np.array([_psi_norm(k, alpha) for k in range(kmax + 1)])
    return norms.reshape((-1,) + (1,) * r.ndim) * lag * np.exp(-0.5 * r * r)


def psi(k, alpha, r):
    if alpha < -0.5:
        raise ValueError("alpha must be >= -1/2")
    return psi_table(k, alpha, r)[k]


def psi_deriv(k, alpha, r):
    """Analytic ``d/dr psi_k^alpha`` via ``d/dx L_k^alpha = -L_{k-1}^{alpha+1}``."""
    r = np.asarray(r, dtype=float)
    x = r * r
    lk = laguerre_poly(k, alpha, x)
    dl = -laguerre_poly(k - 1, alpha + 1, x) if k > 0 else 0.0
    return _psi_norm(k, alpha) * (2 * r * dl - r * lk) * np.exp(-0.5 * x)


def _phi_norm(k, delta):
    return math.exp(0.5 * (gammaln(k + 1) - delta * math.log(2.0) - gammaln(k + delta + 1)))


def phi_small_table(kmax, delta, r):
    """Rows ``phi_k^delta(r)``, orthonormal in L^2(R^+, r^{2 delta + 1} dr)."""
    r = np.asarray(r, dtype=float)
    lag = laguerre_table(kmax, delta, 0.5 * r * r)
    norms = np.array([_phi_norm(k, delta) for k in range(kmax + 1)])
    return norms.reshape((-1,) + (1,) * r.ndim) * lag * np.exp(-0.25 * r * r)


def phi_small(k, delta, r):
    if delta <= -0.5:
        raise ValueError("delta must exceed -1/2")
    return phi_small_table(k, delta, r)[k]


def laguerre_phi_fock(k, d, z):
    """``phi_k(z) = L_k^{d-1}(|z|^2/2) exp(-|z|^2/4)`` for z of shape (..., d)."""
    z = np.asarray(z)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    return laguerre_poly(k, d - 1, 0.5 * s) * np.exp(-0.25 * s)


def gegenbauer_norm(m, d, u):
    """Ultraspherical polynomial of index d/2 - 1, normalised to 1 at u = 1.

    d = 2 is the Chebyshev limit ``T_m``.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1 + 1e-14):
        raise ValueError("domain error: |u| > 1")
    lam = 0.5 * d - 1.0
    p_prev = np.ones_like(u)
    if m == 0:
        return p_prev
    if lam == 0:
        p = u.copy()
        for n in range(1, m):
            p, p_prev = 2 * u * p - p_prev, p
        return p
    # recurrence for C_n^lam, then divide by C_m^lam(1) = binom(m + 2 lam - 1, m)
    p = 2 * lam * u
    for n in range(1, m):
        p, p_prev = (2 * (n + lam) * u * p - (n + 2 * lam - 1) * p_prev) / (n + 1), p
    at_one = math.exp(gammaln(m + 2 * lam) - gammaln(m + 1) - gammaln(2 * lam))
    return p / at_one
