"""Heat kernels and Riesz kernels for the Hermite, Laguerre and special Hermite operators.

Heat kernels have a closed-form route and a truncated eigen-series route;
Riesz kernels are subordinated heat-kernel derivatives,
``pi^{-1/2} int_0^oo (D K_t) t^{-1/2} dt``, with the derivative taken
analytically and the t-integral done by
:func:`~riesz_hermite.quadrature.halfline_subordination`.

Index conventions: Riesz components ``j`` are 1-based (``R_1 .. R_d``).
Points in R^d have shape ``(..., d)``; points in C^d are complex ``(..., d)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .constants import special_heat_constant
from .quadrature import graded_rule, halfline_subordination, sphere_area
from .specfun import (
    bessel_i_scaled,
    gegenbauer_norm,
    hermite_fn_table,
    laguerre_table,
    phi_small_table,
    psi_table,
)

__all__ = [
    "ROUTES",
    "KernelQuery",
    "NearDiagonalError",
    "diag_cutoff",
    "hermite_riesz_ab",
    "hermite_riesz_kernel",
    "k_small",
    "kernel_sweep_csv",
    "laguerre_heat",
    "mehler",
    "mehler_polar",
    "projected_kernel_Km",
    "series_cutoff",
    "special_heat",
    "special_riesz_kernel",
    "special_riesz_radial",
]

ROUTES = ("closed_form", "eigen_series", "subordination")
SERIES_TOL = 1e-14
CHUNK = 4096


class NearDiagonalError(ValueError):
    """Riesz-kernel query inside the diagonal cutoff."""


def diag_cutoff(x):
    """Default near-diagonal cutoff ``1e-3 (1 + |x|)``."""
    x = np.asarray(x)
    return 1e-3 * (1.0 + float(np.linalg.norm(x)))


def _check_t(t):
    t = float(t)
    if not t > 0 or not math.isfinite(t):
        raise ValueError(f"invalid-argument: t must be positive, got {t}")
    return t


def _check_route(route, allowed):
    if route not in allowed:
        raise ValueError(f"route {route!r} not supported here; choose from {allowed}")


def series_cutoff(rate, power=0.0, tol=SERIES_TOL, log_scale=0.0):
    """Smallest K with ``exp(log_scale) (K+1)^power exp(-rate K) < tol``."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    k = 2
    while log_scale + power * math.log(k + 1) - rate * k >= math.log(tol):
        k += 1
        if k > 20000:
            raise ValueError("series truncation exceeds 20000 terms; t too small for the eigen-series route")
    return k


def _as_points(x, d):
    x = np.asarray(x, dtype=float)
    if d is None:
        d = 1 if x.ndim == 0 else x.shape[-1]
    if x.ndim == 0 or (d == 1 and x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != d:
        raise ValueError(f"points have trailing dimension {x.shape[-1]}, expected d={d}")
    return x, d


# ----------------------------------------------------------------------
# Hermite (Mehler) kernel


def mehler(t, x, y, d=None, route="closed_form", kmax=None):
    """Mehler kernel of ``e^{-tH}``, ``H = -Delta + |x|^2`` on R^d.

    ``closed_form``::

        (2 pi)^{-d/2} (sinh 2t)^{-d/2} exp(-coth(t)|x-y|^2/4 - tanh(t)|x+y|^2/4)

    ``eigen_series`` sums ``exp(-(2|mu|+d)t) Phi_mu(x) Phi_mu(y)`` over
    ``|mu| <= kmax`` (tail-bound choice when ``kmax`` is None).
    """
    t = _check_t(t)
    x, d = _as_points(x, d)
    y, _ = _as_points(y, d)
    x, y = np.broadcast_arrays(x, y)
    if route == "closed_form":
        dsq = np.sum((x - y) ** 2, axis=-1)
        ssq = np.sum((x + y) ** 2, axis=-1)
        logk = -0.5 * d * math.log(2 * math.pi * math.sinh(2 * t)) - 0.25 / math.tanh(t) * dsq - 0.25 * math.tanh(t) * ssq
        return np.exp(logk)
    _check_route(route, ("closed_form", "eigen_series"))
    if kmax is None:
        kmax = series_cutoff(2 * t, power=d - 1)
    damp = np.exp(-2 * t * np.arange(kmax + 1)).reshape((-1,) + (1,) * (x.ndim - 1))
    level = None
    for j in range(d):
        cj = hermite_fn_table(kmax, x[..., j]) * hermite_fn_table(kmax, y[..., j]) * damp
        if level is None:
            level = cj
            continue
        # total-degree convolution keeps only |mu| <= kmax
        new = np.zeros_like(level)
        for n in range(kmax + 1):
            new[n] = np.sum(level[: n + 1] * cj[n::-1], axis=0)
        level = new
    return math.exp(-d * t) * np.sum(level, axis=0)


def mehler_polar(t, r, s, u, d):
    """Mehler kernel as a function of ``|x| = r``, ``|y| = s``, ``x'.y' = u``.

    Uses ``(2pi)^{-d/2}(sinh 2t)^{-d/2} exp(-coth(2t)(r^2+s^2)/2 + r s u / sinh 2t)``
    rewritten as ``-coth(2t)|x-y|^2/2 - r s u tanh(t)`` for stability.
    """
    t = _check_t(t)
    r, s, u = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, s, u)))
    if np.any(np.abs(u) > 1 + 1e-13):
        raise ValueError("u must lie in [-1, 1]")
    dsq = r * r + s * s - 2 * r * s * u
    logk = -0.5 * d * math.log(2 * math.pi * math.sinh(2 * t)) - 0.5 / math.tanh(2 * t) * dsq - r * s * u * math.tanh(t)
    return np.exp(logk)


def _mehler_polar_t(t, r, s, u, d):
    """Vectorised over an array of times (no validation); broadcasting is the caller's."""
    dsq = r * r + s * s - 2 * r * s * u
    return np.exp(-0.5 * d * np.log(2 * np.pi * np.sinh(2 * t)) - 0.5 / np.tanh(2 * t) * dsq - r * s * u * np.tanh(t))


# ----------------------------------------------------------------------
# Laguerre kernels


def laguerre_heat(t, r, s, alpha, route="closed_form", kmax=None):
    """Kernel of ``exp(-t L_alpha)`` with respect to ``r^{2 alpha + 1} dr``.

    ``closed_form`` uses the Bessel form (exp-scaled I_alpha, so no overflow);
    ``eigen_series`` sums ``exp(-(4k+2alpha+2)t) psi_k(r) psi_k(s)``.
    """
    t = _check_t(t)
    if alpha < -0.5:
        raise ValueError("alpha must be >= -1/2")
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    if route == "closed_form":
        arg = r * s / math.sinh(2 * t)
        # exp(-coth(2t)(r^2+s^2)/2 + rs/sinh 2t) = exp(-coth(2t)(r-s)^2/2 - rs tanh t)
        expo = -0.5 / math.tanh(2 * t) * (r - s) ** 2 - r * s * math.tanh(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            rs_pow = np.where(r * s > 0, (r * s) ** (-alpha) if alpha else 1.0, 0.0)
            val = np.exp(expo) * rs_pow * bessel_i_scaled(alpha, arg) / math.sinh(2 * t)
        zero = r * s == 0
        if np.any(zero):
            # (rs)^{-alpha} I_alpha(rs/sinh 2t) -> (2 sinh 2t)^{-alpha} / Gamma(alpha + 1)
            lim = math.exp(-alpha * math.log(2 * math.sinh(2 * t)) - gammaln(alpha + 1))
            val = np.where(zero, np.exp(-0.5 / math.tanh(2 * t) * (r * r + s * s)) * lim / math.sinh(2 * t), val)
        return val
    _check_route(route, ("closed_form", "eigen_series"))
    if kmax is None:
        kmax = series_cutoff(4 * t, power=alpha + 1.0)
    damp = np.exp(-4 * t * np.arange(kmax + 1)).reshape((-1,) + (1,) * r.ndim)
    terms = psi_table(kmax, alpha, r) * psi_table(kmax, alpha, s) * damp
    return math.exp(-(2 * alpha + 2) * t) * np.sum(terms, axis=0)


def k_small(t, r, s, delta, route="closed_form", kmax=None):
    """Kernel ``sum_k exp(-(2k+delta+1)t) phi_k(r) phi_k(s)``.

    ``closed_form`` is the rescaling ``2^{-delta-1} K^delta_{t/2}(r/sqrt2, s/sqrt2)``
    of :func:`laguerre_heat`; ``eigen_series`` sums the series directly.
    """
    t = _check_t(t)
    if route == "closed_form":
        r2 = np.asarray(r, dtype=float) / math.sqrt(2.0)
        s2 = np.asarray(s, dtype=float) / math.sqrt(2.0)
        return 2.0 ** (-delta - 1) * laguerre_heat(0.5 * t, r2, s2, delta)
    _check_route(route, ("closed_form", "eigen_series"))
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    if kmax is None:
        kmax = series_cutoff(2 * t, power=delta + 1.0)
    damp = np.exp(-2 * t * np.arange(kmax + 1)).reshape((-1,) + (1,) * r.ndim)
    terms = phi_small_table(kmax, delta, r) * phi_small_table(kmax, delta, s) * damp
    return math.exp(-(delta + 1) * t) * np.sum(terms, axis=0)


# ----------------------------------------------------------------------
# special Hermite heat kernel


def special_heat(t, z, d=None, route="closed_form", kmax=None, radial=False):
    """Heat kernel ``p_t`` of the special Hermite operator on C^d.

    The eigen-series ``(2pi)^{-d} sum_k exp(-(2k+d)t) phi_k(z)`` is the
    normative definition.  ``closed_form`` returns
    ``c_d (sinh t)^{-d} exp(-|z|^2 coth(t) / 4)`` with the pinned calibrated
    ``c_d`` (see :mod:`riesz_hermite.constants`).

    With ``radial=True`` the argument is ``|z|`` and ``d`` is required.
    """
    t = _check_t(t)
    if radial:
        if d is None:
            raise ValueError("d is required for radial evaluation")
        rho2 = np.asarray(z, dtype=float) ** 2
    else:
        z = np.asarray(z, dtype=complex)
        if d is None:
            d = 1 if z.ndim == 0 else z.shape[-1]
        if z.ndim == 0 or (d == 1 and z.shape[-1] != 1):
            z = z[..., None]
        rho2 = np.sum(np.abs(z) ** 2, axis=-1)
    if route == "closed_form":
        return special_heat_constant(d) * np.exp(-d * math.log(math.sinh(t)) - 0.25 / math.tanh(t) * rho2)
    _check_route(route, ("closed_form", "eigen_series"))
    if kmax is None:
        # |phi_k| <= binom(k+d-1, k)
        kmax = series_cutoff(2 * t, power=d - 1.0)
    damp = np.exp(-2 * t * np.arange(kmax + 1)).reshape((-1,) + (1,) * rho2.ndim)
    terms = laguerre_table(kmax, d - 1, 0.5 * rho2) * damp
    return (2 * math.pi) ** (-d) * math.exp(-d * t) * np.exp(-0.25 * rho2) * np.sum(terms, axis=0)


def special_heat_shape(t, rho, d):
    """``(sinh t)^{-d} exp(-rho^2 coth(t)/4)``: the closed form without its constant."""
    t = _check_t(t)
    rho = np.asarray(rho, dtype=float)
    return np.exp(-d * math.log(math.sinh(t)) - 0.25 / math.tanh(t) * rho * rho)


# ----------------------------------------------------------------------
# Riesz kernels


def _default_rule(decay, tol):
    return halfline_subordination(decay, tol=tol)


def hermite_riesz_kernel(j, x, y, d=None, cutoff=None, tol=1e-12, rule=None):
    """Kernel ``R_j(x, y)`` of ``R_j = A_j H^{-1/2}`` for ``x != y``.

    The integrand is the analytic derivative
    ``(d/dx_j + x_j) K_t = [x_j - coth(t)(x_j-y_j)/2 - tanh(t)(x_j+y_j)/2] K_t``.
    ``x`` is a single point, ``y`` may hold many points ``(N, d)``.
    Points closer than ``cutoff`` (default ``1e-3 (1+|x|)``) raise
    :class:`NearDiagonalError`.
    """
    x, d = _as_points(x, d)
    y, _ = _as_points(y, d)
    if x.ndim != 1:
        raise ValueError("x must be a single point")
    if not 1 <= j <= d:
        raise ValueError(f"component j must be in 1..{d}")
    cut = diag_cutoff(x) if cutoff is None else cutoff
    dist = np.linalg.norm(y - x, axis=-1)
    if np.any(dist < cut):
        raise NearDiagonalError(f"near-diagonal query: |x-y| = {dist.min():.3g} < cutoff {cut:.3g}")
    rule = rule or _default_rule(float(d), tol)
    t = rule.nodes[:, None]
    w = rule.weights[:, None]
    coth, tanh = 1.0 / np.tanh(t), np.tanh(t)
    lognorm = -0.5 * d * np.log(2 * np.pi * np.sinh(2 * t))
    shape = y.shape[:-1]
    yf = y.reshape(-1, d)
    out = np.empty(len(yf))
    for a in range(0, len(yf), CHUNK):
        yy = yf[a : a + CHUNK]
        diff = x - yy
        summ = x + yy
        dsq = np.sum(diff * diff, axis=-1)[None, :]
        ssq = np.sum(summ * summ, axis=-1)[None, :]
        kt = np.exp(lognorm - 0.25 * coth * dsq - 0.25 * tanh * ssq)
        fac = x[j - 1] - 0.5 * coth * diff[None, :, j - 1] - 0.5 * tanh * summ[None, :, j - 1]
        out[a : a + CHUNK] = np.sum(w * fac * kt, axis=0)
    return (out / math.sqrt(math.pi)).reshape(shape)


def hermite_riesz_ab(r, s, u, d, tol=1e-12, rule=None):
    """Scalar profiles with ``R_j(r w, s w') = r w_j a(r,s,u) + s w'_j b(r,s,u)``.

    ``a = pi^{-1/2} int (1 - coth/2 - tanh/2) K_t t^{-1/2} dt`` and
    ``b = pi^{-1/2} int (coth/2 - tanh/2) K_t t^{-1/2} dt``.
    """
    r, s, u = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, s, u)))
    rule = rule or _default_rule(float(d), tol)
    t = rule.nodes.reshape((-1,) + (1,) * r.ndim)
    w = rule.weights.reshape(t.shape)
    kt = _mehler_polar_t(t, r, s, u, d)
    coth, tanh = 1.0 / np.tanh(t), np.tanh(t)
    a = np.sum(w * (1 - 0.5 * coth - 0.5 * tanh) * kt, axis=0) / math.sqrt(math.pi)
    b = np.sum(w * (0.5 * coth - 0.5 * tanh) * kt, axis=0) / math.sqrt(math.pi)
    return a, b


def special_riesz_radial(rho, d, conjugate=False, tol=1e-12, rule=None):
    """Radial factor of the special Hermite Riesz kernels.

    ``s_j(z) = conj(z_j) sigma(|z|)`` with
    ``sigma = pi^{-1/2} int (1 - coth t) p_t / 4 t^{-1/2} dt``; for the
    conjugate kernel ``z_j sigma_bar(|z|)`` with weight ``-(1 + coth t)/4``.
    """
    rho = np.asarray(rho, dtype=float)
    rule = rule or _default_rule(float(d), tol)
    t = rule.nodes.reshape((-1,) + (1,) * rho.ndim)
    w = rule.weights.reshape(t.shape)
    coth = 1.0 / np.tanh(t)
    pt = special_heat_constant(d) * np.exp(-d * np.log(np.sinh(t)) - 0.25 * coth * rho * rho)
    weight = -0.25 * (1 + coth) if conjugate else 0.25 * (1 - coth)
    return np.sum(w * weight * pt, axis=0) / math.sqrt(math.pi)


def special_riesz_kernel(j, z, d=None, conjugate=False, cutoff=None, tol=1e-12, rule=None):
    """Kernel ``s_j(z)`` of ``S_j = Z_j L^{-1/2}`` (or of the conjugate transform).

    Uses the reductions ``Z_j p_t = conj(z_j)(1 - coth t) p_t / 4`` and
    ``Zbar_j p_t = -z_j (1 + coth t) p_t / 4``.
    """
    z = np.asarray(z, dtype=complex)
    if d is None:
        d = 1 if z.ndim == 0 else z.shape[-1]
    if z.ndim == 0 or (d == 1 and z.shape[-1] != 1):
        z = z[..., None]
    if not 1 <= j <= d:
        raise ValueError(f"component j must be in 1..{d}")
    rho = np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
    cut = 1e-3 if cutoff is None else cutoff
    if np.any(rho < cut):
        raise NearDiagonalError(f"near-diagonal query: |z| = {rho.min():.3g} < cutoff {cut:.3g}")
    sigma = special_riesz_radial(rho, d, conjugate=conjugate, tol=tol, rule=rule)
    zj = z[..., j - 1]
    return (zj if conjugate else np.conj(zj)) * sigma


def projected_kernel_Km(m, r, s, d, deriv=0, tol=1e-12, n=16, cutoff=None):
    """Subordinated zonal projection of the Mehler kernel.

    ``K_m(r, s) = pi^{-1/2} int_0^oo int_{S^{d-1}} K_t(r, s, x'.y') P_m(x'.y') dy' t^{-1/2} dt``
    where the sphere integral is reduced (Funk-Hecke) to
    ``|S^{d-2}| int_0^pi K_t(r,s,cos th) P_m(cos th) sin^{d-2}(th) d th``.
    The angle rule is graded toward ``th = 0`` where the kernel peaks for
    small t.  ``deriv=1`` returns ``(d/dr + r) K_m`` using the analytic
    derivative ``(r(1 - coth 2t) + s u / sinh 2t) K_t``.
    """
    if not 2 <= d <= 4:
        raise ValueError("unsupported-dimension: projected_kernel_Km supports 2 <= d <= 4")
    if not 0 <= m <= 8:
        raise ValueError("unsupported-range: m must be in 0..8")
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    cut = 1e-3 * (1 + r) if cutoff is None else cutoff
    if np.any(np.abs(r - s) < cut):
        raise NearDiagonalError("near-diagonal query for K_m (r close to s)")
    trule = _default_rule(float(d), tol)
    th = graded_rule(0.0, math.pi, n, 1e-5)
    u = np.cos(th.nodes)
    ang = th.weights * np.sin(th.nodes) ** (d - 2) * gegenbauer_norm(m, d, np.clip(u, -1, 1)) * sphere_area(d - 1)
    t = trule.nodes[:, None, None]
    wt = trule.weights[:, None, None]
    uu = u[None, :, None]
    flat_r, flat_s = r.ravel(), s.ravel()
    out = np.empty(flat_r.shape)
    step = 16
    for a in range(0, len(flat_r), step):
        rr = flat_r[a : a + step][None, None, :]
        ss = flat_s[a : a + step][None, None, :]
        kt = _mehler_polar_t(t, rr, ss, uu, d)
        if deriv == 1:
            kt = (rr * (1 - 1 / np.tanh(2 * t)) + ss * uu / np.sinh(2 * t)) * kt
        elif deriv != 0:
            raise ValueError("deriv must be 0 or 1")
        inner = np.einsum("tuk,u->tk", kt, ang)
        out[a : a + step] = np.sum(wt[:, 0, :] * inner, axis=0)
    return (out / math.sqrt(math.pi)).reshape(r.shape)


# ----------------------------------------------------------------------
# queries and sweeps


@dataclass(frozen=True)
class KernelQuery:
    """One kernel evaluation request.

    ``kernel`` names a function of this module; ``points`` holds its
    positional point arguments (``(x, y)``, ``(r, s)``, ``(r, s, u)`` or
    ``(z,)``); ``params`` carries the remaining keyword arguments such as
    ``alpha``, ``delta``, ``j`` or ``m``.
    """

    kernel: str
    points: tuple
    d: int
    t: float | None = None
    route: str = "closed_form"
    kmax: int | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kernel not in _DISPATCH:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        if self.t is not None and not self.t > 0:
            raise ValueError("t must be positive")

    def evaluate(self):
        return _DISPATCH[self.kernel](self)


_DISPATCH = {
    "mehler": lambda q: mehler(q.t, *q.points, d=q.d, route=q.route, kmax=q.kmax),
    "mehler_polar": lambda q: mehler_polar(q.t, *q.points, d=q.d),
    "laguerre_heat": lambda q: laguerre_heat(q.t, *q.points, alpha=q.params["alpha"], route=q.route, kmax=q.kmax),
    "special_heat": lambda q: special_heat(q.t, *q.points, d=q.d, route=q.route, kmax=q.kmax),
    "k_small": lambda q: k_small(q.t, *q.points, delta=q.params["delta"], route=q.route, kmax=q.kmax),
    "hermite_riesz": lambda q: hermite_riesz_kernel(q.params["j"], *q.points, d=q.d),
    "special_riesz": lambda q: special_riesz_kernel(q.params["j"], *q.points, d=q.d),
    "Km": lambda q: projected_kernel_Km(q.params["m"], *q.points, d=q.d),
}


def _fmt(v):
    arr = np.asarray(v)
    if arr.ndim == 0:
        return repr(arr.item())
    return " ".join(repr(complex(a)) if np.iscomplexobj(arr) else repr(float(a)) for a in arr.ravel())


def kernel_sweep_csv(queries):
    """Evaluate queries and return CSV text (parameters, route, value)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kernel", "d", "t", "route", "kmax", "points", "params", "value"])
    for q in queries:
        val = q.evaluate()
        writer.writerow(
            [
                q.kernel,
                q.d,
                "" if q.t is None else repr(q.t),
                q.route,
                "" if q.kmax is None else q.kmax,
                "; ".join(_fmt(p) for p in q.points),
                " ".join(f"{k}={q.params[k]}" for k in sorted(q.params)),
                _fmt(val),
            ]
        )
    return buf.getvalue()
