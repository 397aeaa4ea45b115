"""Band-limited functions and the operators acting on them.

Three orthonormal systems are supported:

``hermite``
    ``Phi_mu(x) = prod_j h_{mu_j}(x_j)`` on R^d, labels are tuples ``mu``,
    eigenvalue ``2|mu| + d`` for ``H = -Delta + |x|^2``.
``laguerre``
    ``psi_k^alpha(r)`` on (0, oo) with ``r^{2 alpha + 1} dr``, labels ``k``,
    eigenvalue ``4k + 2 alpha + 2``.
``special_hermite``
    ``P^j_{m,n}(z) phi_k^delta(|z|)`` on C^d with ``delta = d + m + n - 1``
    and ``P^j_{m,n}`` the solid bigraded harmonic, labels ``(m, n, j, k)``
    (j 1-based), eigenvalue ``2(k + m) + d`` for the twisted Laplacian.

Each operator has an exact spectral route; quadrature routes (kernel
integrals, twisted convolution, subordination) are the independent checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import cache, lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_genlaguerre

from .kernels import (
    diag_cutoff,
    hermite_riesz_kernel,
    laguerre_heat,
    mehler,
    special_heat,
    special_riesz_radial,
)
from .quadrature import (
    complex_sphere_rule,
    composite_rule,
    graded_rule,
    halfline_subordination,
)
from .specfun import bigraded_basis, hermite_fn_table, laguerre_table, psi, psi_table
from .specfun.functions import _phi_norm

__all__ = [
    "BandLimitedFunction",
    "OperatorRoute",
    "ResolutionError",
    "eigenvalue",
    "expand",
    "half_inverse",
    "heat_apply",
    "hermite_mode",
    "hermite_riesz",
    "ladder",
    "laguerre_mode",
    "laguerre_riesz",
    "random_band_limited",
    "rotate",
    "special_Z",
    "special_mode",
    "special_riesz",
    "synthesize",
    "twisted_convolve",
]

BASES = ("hermite", "laguerre", "special_hermite")


class OperatorRoute(str, Enum):
    SPECTRAL = "spectral"
    KERNEL_INTEGRAL = "kernel_integral"
    TWISTED_CONVOLUTION = "twisted_convolution"
    SUBORDINATION = "subordination"


class ResolutionError(ValueError):
    """Quadrature resolution too low for the requested cutoff or tolerance."""


def _label(basis, key):
    if basis == "laguerre":
        return int(key)
    return tuple(int(v) for v in key)


def _degree(basis, label):
    if basis == "hermite":
        return sum(label)
    if basis == "laguerre":
        return label
    m, n, _, k = label
    return 2 * k + m + n


@dataclass(frozen=True)
class BandLimitedFunction:
    """Finite expansion in one of the orthonormal systems.

    ``param`` is the dimension d (``hermite``, ``special_hermite``) or the
    type alpha (``laguerre``).  ``coeffs`` maps labels to complex numbers.
    ``cutoff`` bounds the polynomial degree of every mode: ``|mu|``, ``k``
    or ``2k + m + n``.
    """

    basis: str
    param: float
    coeffs: dict
    cutoff: int

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        clean = {}
        for key, c in self.coeffs.items():
            lab = _label(self.basis, key)
            if self.basis == "hermite" and len(lab) != int(self.param):
                raise ValueError("multi-index length must equal d")
            if _degree(self.basis, lab) > self.cutoff:
                raise ValueError(f"mode {lab} exceeds cutoff {self.cutoff}")
            if c != 0:
                clean[lab] = complex(c)
        object.__setattr__(self, "coeffs", clean)
        if self.basis == "laguerre" and self.param < -0.5:
            raise ValueError("alpha must be >= -1/2")

    @property
    def d(self):
        if self.basis == "laguerre":
            raise AttributeError("laguerre expansions have no dimension")
        return int(self.param)

    def with_coeffs(self, coeffs, cutoff=None):
        return BandLimitedFunction(self.basis, self.param, coeffs, self.cutoff if cutoff is None else cutoff)

    def norm(self):
        """L^2 norm by Parseval."""
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def __add__(self, other):
        if (self.basis, self.param) != (other.basis, other.param):
            raise ValueError("cannot add expansions in different bases")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return self.with_coeffs(out, max(self.cutoff, other.cutoff))

    def scale(self, s):
        return self.with_coeffs({k: s * c for k, c in self.coeffs.items()})

    def __call__(self, points):
        return synthesize(self, points)

    def to_json(self):
        rows = []
        for lab in sorted(self.coeffs, key=lambda v: (v,) if isinstance(v, int) else v):
            c = self.coeffs[lab]
            rows.append([[lab] if isinstance(lab, int) else list(lab), c.real, c.imag])
        return json.dumps(
            {"schema": 1, "basis": self.basis, "param": self.param, "cutoff": self.cutoff, "coeffs": rows},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        coeffs = {}
        for lab, re, im in data["coeffs"]:
            key = lab[0] if data["basis"] == "laguerre" else tuple(lab)
            coeffs[key] = complex(re, im)
        return cls(data["basis"], data["param"], coeffs, data["cutoff"])


def eigenvalue(basis, param, label):
    if basis == "hermite":
        return 2 * sum(label) + int(param)
    if basis == "laguerre":
        return 4 * label + 2 * param + 2
    m, n, j, k = label
    return 2 * (k + m) + int(param)


# ----------------------------------------------------------------------
# mode evaluation


def hermite_mode(mu, x):
    x = np.asarray(x, dtype=float)
    val = np.ones(x.shape[:-1])
    for j, k in enumerate(mu):
        val = val * hermite_fn_table(k, x[..., j])[k]
    return val


def laguerre_mode(k, alpha, r):
    return psi(k, alpha, r)


@cache
def _bigraded_poly(d, m, n, j):
    basis = bigraded_basis(d, m, n)
    if not 1 <= j <= len(basis):
        raise ValueError(f"no bigraded harmonic j={j} in H_({m},{n}) for d={d}")
    return basis[j - 1].poly


def _radial_q(k, delta, s, shift=0):
    """``L_k^delta(s/2) exp(-s/4)`` times the phi normalisation (s = |z|^2)."""
    return _phi_norm(k, delta) * laguerre_table(k, delta + shift, 0.5 * s)[k] * np.exp(-0.25 * s)


def special_mode(label, d, z):
    """``P^j_{m,n}(z) phi_k^delta(|z|)`` at complex points ``(N, d)``."""
    m, n, j, k = label
    z = np.asarray(z, dtype=complex)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    p = _bigraded_poly(d, m, n, j).eval_complex(z)
    return p * _radial_q(k, d + m + n - 1, s)


def synthesize(g, points):
    """Values of a band-limited function at sample points."""
    if g.basis == "hermite":
        x = np.asarray(points, dtype=float)
        if x.shape[-1] != g.d:
            raise ValueError("points must have trailing dimension d")
        if not g.coeffs:
            return np.zeros(x.shape[:-1], dtype=complex)
        top = max(max(mu) for mu in g.coeffs)
        tabs = [hermite_fn_table(top, x[..., j]) for j in range(g.d)]
        out = np.zeros(x.shape[:-1], dtype=complex)
        for mu, c in g.coeffs.items():
            val = np.ones(x.shape[:-1])
            for j, k in enumerate(mu):
                val = val * tabs[j][k]
            out = out + c * val
        return out
    if g.basis == "laguerre":
        r = np.asarray(points, dtype=float)
        if not g.coeffs:
            return np.zeros(r.shape, dtype=complex)
        tab = psi_table(max(g.coeffs), g.param, r)
        return sum(c * tab[k] for k, c in g.coeffs.items())
    z = np.asarray(points, dtype=complex)
    out = np.zeros(z.shape[:-1], dtype=complex)
    for lab, c in g.coeffs.items():
        out = out + c * special_mode(lab, g.d, z)
    return out


# ----------------------------------------------------------------------
# expansion by exact quadrature


def _hermite_modes(d, cutoff):
    from .specfun import multi_indices

    return multi_indices(d, cutoff)


def _special_labels(d, cutoff):
    labels = []
    for m in range(cutoff + 1):
        for n in range(cutoff + 1 - m):
            dim = len(bigraded_basis(d, m, n)) if m + n <= 6 else 0
            for j in range(1, dim + 1):
                for k in range((cutoff - m - n) // 2 + 1):
                    labels.append((m, n, j, k))
    return labels


def expand(f, basis, param, cutoff, nodes=None, tol=1e-13):
    """Coefficients of ``f`` against every mode up to ``cutoff``.

    ``f`` is a callable on sample points.  The rules are Gauss-Hermite
    (hermite), generalized Gauss-Laguerre in ``r^2`` (laguerre) and a
    radial Gauss-Laguerre times complex-sphere product (special_hermite),
    each exact when ``f`` is band-limited to ``cutoff`` and ``nodes``
    exceeds ``cutoff``.  Coefficients below ``tol`` are dropped.
    """
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}")
    n = cutoff + 2 if nodes is None else nodes
    if n <= cutoff:
        raise ResolutionError(f"{n} quadrature nodes cannot resolve cutoff {cutoff}")
    coeffs = {}
    if basis == "hermite":
        d = int(param)
        xg, wg = hermgauss(n)
        grids = np.meshgrid(*([xg] * d), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        wgrids = np.meshgrid(*([wg * np.exp(xg * xg)] * d), indexing="ij")
        w = np.prod([g.ravel() for g in wgrids], axis=0)
        vals = np.asarray(f(pts)) * w
        tabs = [hermite_fn_table(cutoff, pts[:, j]) for j in range(d)]
        for mu in _hermite_modes(d, cutoff):
            mode = np.ones(len(pts))
            for j, k in enumerate(mu):
                mode = mode * tabs[j][k]
            coeffs[mu] = np.sum(vals * mode)
    elif basis == "laguerre":
        alpha = float(param)
        s, ws = roots_genlaguerre(n, alpha)
        r = np.sqrt(s)
        vals = np.asarray(f(r)) * ws * np.exp(s) * 0.5
        tab = psi_table(cutoff, alpha, r)
        for k in range(cutoff + 1):
            coeffs[k] = np.sum(vals * tab[k])
    else:
        d = int(param)
        s, ws = roots_genlaguerre(n, d - 1)
        # r^{2d-1} dr = 2^{d-1} s^{d-1} ds with s = r^2 / 2
        r = np.sqrt(2 * s)
        wr = ws * np.exp(s) * 2.0 ** (d - 1)
        sph = complex_sphere_rule(d, cutoff + 1)
        pts = (r[:, None, None] * sph.nodes[None, :, :]).reshape(-1, d)
        w = (wr[:, None] * sph.weights[None, :]).ravel()
        vals = np.asarray(f(pts)) * w
        for lab in _special_labels(d, cutoff):
            coeffs[lab] = np.sum(vals * np.conj(special_mode(lab, d, pts)))
    coeffs = {k: complex(v) for k, v in coeffs.items() if abs(v) > tol}
    return BandLimitedFunction(basis, param, coeffs, cutoff)


# ----------------------------------------------------------------------
# spectral operators


def ladder(j, direction, f):
    """``A_j = d/dx_j + x_j`` (annihilate) or ``A_j^* = -d/dx_j + x_j`` (create).

    ``A_j Phi_mu = sqrt(2 mu_j) Phi_{mu - e_j}``,
    ``A_j^* Phi_mu = sqrt(2 mu_j + 2) Phi_{mu + e_j}``; j is 1-based.
    """
    if f.basis != "hermite":
        raise ValueError("ladder operators act on hermite expansions")
    if not 1 <= j <= f.d:
        raise ValueError(f"j must be in 1..{f.d}")
    i = j - 1
    out = {}
    if direction == "annihilate":
        for mu, c in f.coeffs.items():
            if mu[i] == 0:
                continue
            nu = mu[:i] + (mu[i] - 1,) + mu[i + 1 :]
            out[nu] = out.get(nu, 0) + math.sqrt(2 * mu[i]) * c
        return f.with_coeffs(out)
    if direction == "create":
        for mu, c in f.coeffs.items():
            nu = mu[:i] + (mu[i] + 1,) + mu[i + 1 :]
            out[nu] = out.get(nu, 0) + math.sqrt(2 * mu[i] + 2) * c
        return f.with_coeffs(out, f.cutoff + 1)
    raise ValueError("direction must be 'annihilate' or 'create'")


def _spectral_multiply(f, fn):
    return f.with_coeffs({lab: fn(eigenvalue(f.basis, f.param, lab)) * c for lab, c in f.coeffs.items()})


def _tensor_legendre(d, n, half_width):
    x, w = leggauss(n)
    x, w = half_width * x, half_width * w
    grids = np.meshgrid(*([x] * d), indexing="ij")
    wg = np.meshgrid(*([w] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wg], axis=-1), axis=-1)
    return pts, weights


def heat_apply(f, t, route="spectral", points=None, n=None, half_width=11.0):
    """Heat semigroup ``exp(-t A)`` for the operator matching ``f.basis``.

    ``spectral`` returns a BandLimitedFunction; the quadrature routes return
    values at ``points``: ``kernel_integral`` (Mehler or Laguerre kernel,
    Gauss-Legendre on a truncated box / half-line) and, for the special
    Hermite operator, ``twisted_convolution`` with ``p_t``.
    """
    t = float(t)
    if not t > 0:
        raise ValueError("invalid-argument: t must be positive")
    route = OperatorRoute(route)
    if route is OperatorRoute.SPECTRAL:
        return _spectral_multiply(f, lambda lam: math.exp(-lam * t))
    if points is None:
        raise ValueError("quadrature routes need sample points")
    if f.basis == "hermite" and route is OperatorRoute.KERNEL_INTEGRAL:
        d = f.d
        ys, wy = _tensor_legendre(d, n or (160 if d == 1 else 90), half_width)
        fy = synthesize(f, ys) * wy
        x = np.asarray(points, dtype=float)
        return np.array([np.sum(mehler(t, xi, ys) * fy) for xi in x.reshape(-1, d)]).reshape(x.shape[:-1])
    if f.basis == "laguerre" and route is OperatorRoute.KERNEL_INTEGRAL:
        alpha = f.param
        rule = composite_rule(np.linspace(0.0, half_width, 23), 20)
        s = rule.nodes
        gs = synthesize(f, s) * rule.weights * s ** (2 * alpha + 1)
        r = np.asarray(points, dtype=float)
        return np.array([np.sum(laguerre_heat(t, ri, s, alpha) * gs) for ri in r.ravel()]).reshape(r.shape)
    if f.basis == "special_hermite" and route is OperatorRoute.TWISTED_CONVOLUTION:
        d = f.d
        return twisted_convolve(lambda z: synthesize(f, z), lambda w: special_heat(t, w, d), points, d)
    raise ValueError(f"route {route.value} not available for basis {f.basis}")


def half_inverse(f, route="spectral", tol=1e-12):
    """``A^{-1/2} f``: exact multiplier ``lambda^{-1/2}`` or the subordination integral.

    The subordination route evaluates ``pi^{-1/2} int exp(-tA) f t^{-1/2} dt``
    with :func:`halfline_subordination` applied to the spectral heat flow.
    """
    route = OperatorRoute(route)
    if route is OperatorRoute.SPECTRAL:
        return _spectral_multiply(f, lambda lam: lam**-0.5)
    if route is not OperatorRoute.SUBORDINATION:
        raise ValueError(f"route {route.value} not available for half_inverse")
    if not f.coeffs:
        return f
    lam_min = min(eigenvalue(f.basis, f.param, lab) for lab in f.coeffs)
    rule = halfline_subordination(lam_min, tol=tol)
    w, t = rule.weights, rule.nodes
    return _spectral_multiply(f, lambda lam: float(np.sum(w * np.exp(-lam * t))) / math.sqrt(math.pi))


def _check_multiplier(val):
    if val > 1 + 1e-12:
        raise AssertionError(f"Riesz multiplier {val} exceeds 1")
    return val


def hermite_riesz(j, f, points=None, route="spectral", adjoint=False, **kw):
    """``R_j = A_j H^{-1/2}`` (``adjoint=True``: ``A_j^* H^{-1/2}``).

    ``spectral`` returns a BandLimitedFunction when ``points`` is None,
    else values.  ``kernel_integral`` integrates :func:`hermite_riesz_kernel`
    in polar coordinates around each point; see :func:`_riesz_functional`.
    """
    if f.basis != "hermite":
        raise ValueError("hermite_riesz acts on hermite expansions")
    route = OperatorRoute(route)
    if route is OperatorRoute.SPECTRAL:
        g = ladder(j, "create" if adjoint else "annihilate", half_inverse(f))
        if not adjoint:
            for mu in f.coeffs:
                lam = eigenvalue("hermite", f.param, mu)
                _check_multiplier(math.sqrt(2 * mu[j - 1] / lam))
        return g if points is None else synthesize(g, points)
    if route is not OperatorRoute.KERNEL_INTEGRAL or adjoint:
        raise ValueError("kernel route is implemented for R_j only")
    x = np.asarray(points, dtype=float)
    out = []
    for xi in x.reshape(-1, f.d):
        nodes, weights = _riesz_functional(j, tuple(xi), f.d, **kw)
        out.append(np.sum(weights * synthesize(f, nodes)))
    return np.array(out).reshape(x.shape[:-1])


def _antipodal_directions(d, m):
    """Direction rule on S^{d-1} that contains -w with every w."""
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    theta = 2 * math.pi * np.arange(m) / m
    circle = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    cw = np.full(m, 2 * math.pi / m)
    if d == 2:
        return circle, cw
    if d == 3:
        u, wu = leggauss(m // 2)
        s = np.sqrt(1 - u * u)
        nodes = np.concatenate(
            [np.repeat(u, m)[:, None], (s[:, None, None] * circle[None]).reshape(-1, 2)], axis=1
        )
        return nodes, (wu[:, None] * cw[None, :]).ravel()
    raise ValueError("unsupported-dimension: kernel-route Riesz transforms support d <= 3")


_LOG_BASIS = 6


def _small_ball_weights(eps):
    """Nodes in [eps, 6 eps] and weights integrating a fit over [0, eps].

    The radial profile near the singularity is modelled as
    ``c0 + c1 log r + c2 r + c3 r log r + c4 r^2 + c5 r^2 log r``
    (log terms appear in odd dimensions), interpolated at Chebyshev points.
    """
    k = np.arange(_LOG_BASIS)
    cheb = 0.5 * (1 - np.cos((2 * k + 1) * math.pi / (2 * _LOG_BASIS)))
    rho = eps * (1 + 5 * cheb)
    x = rho / eps
    V = np.stack([np.ones_like(x), np.log(x), x, x * np.log(x), x * x, x * x * np.log(x)], axis=1)
    # integrals over x in [0, 1] of each basis function (times eps for the r-scale)
    integ = np.array([1.0, -1.0, 0.5, -0.25, 1.0 / 3.0, -1.0 / 9.0]) * eps
    return rho, np.linalg.solve(V.T, integ)


@lru_cache(maxsize=64)
def _riesz_functional(j, x, d, n=16, angles=160, reach=10.0, tol=1e-12):
    """Nodes and weights with ``R_j f(x) ~ sum_i w_i f(y_i)``.

    Polar coordinates ``y = x + rho w`` around the singularity.  The
    angular rule is antipodally symmetric, so the odd leading part of the
    kernel cancels exactly; the bounded radial profile is integrated on
    panels graded from ``eps = 2 * cutoff`` to ``|x| + reach`` and the inner
    ball ``[0, eps]`` is handled by :func:`_small_ball_weights`.
    """
    x = np.asarray(x, dtype=float)
    eps = 2 * diag_cutoff(x)
    rho_max = float(np.linalg.norm(x)) + reach
    radial = graded_rule(eps, rho_max, n, eps, ratio=2.0)
    fit_rho, fit_w = _small_ball_weights(eps)
    rho = np.concatenate([radial.nodes, fit_rho])
    wr = np.concatenate([radial.weights, fit_w])
    dirs, wd = _antipodal_directions(d, angles)
    y = x + rho[:, None, None] * dirs[None, :, :]
    rule = halfline_subordination(float(d), tol=tol)
    ker = hermite_riesz_kernel(j, x, y.reshape(-1, d), d=d, cutoff=0.5 * eps, rule=rule).reshape(y.shape[:2])
    w = (wr * rho ** (d - 1))[:, None] * wd[None, :] * ker
    return y.reshape(-1, d), w.ravel()


def laguerre_riesz(alpha, g, points=None, route="spectral"):
    """``R^alpha = (d/dr + r) L_alpha^{-1/2}``.

    Uses ``(d/dr + r) psi_k^alpha = -2 sqrt(k) r psi_{k-1}^{alpha+1}``.
    """
    if g.basis != "laguerre" or g.param != alpha:
        raise ValueError("input must be a laguerre(alpha) expansion")
    h = half_inverse(g, route=route)
    r = np.asarray(points, dtype=float)
    if not h.coeffs:
        return np.zeros(r.shape, dtype=complex)
    top = max(h.coeffs)
    tab = psi_table(max(top - 1, 0), alpha + 1, r)
    out = np.zeros(r.shape, dtype=complex)
    for k, c in h.coeffs.items():
        if k > 0:
            out = out - 2 * math.sqrt(k) * c * r * tab[k - 1]
    return out


# ----------------------------------------------------------------------
# special Hermite


def twisted_convolve(f, g, points, d, radius=14.0, n=16, panels=14, level=None):
    """``f x g (z) = int f(z - w) g(w) exp(i Im(z . conj w) / 2) dw``.

    Polar quadrature in ``w`` (composite Gauss-Legendre in ``|w|``, uniform
    or product rule on S^{2d-1}).  ``radius`` must cover the Gaussian
    envelopes; the default makes ``exp(-radius^2/4)`` about 5e-22.
    """
    if d not in (1, 2):
        raise ValueError("unsupported-dimension: twisted convolution supports d in {1, 2}")
    if radius * radius / 4 < math.log(1e12):
        raise ResolutionError("radius too small for the Gaussian tail bound")
    radial = composite_rule(np.linspace(0.0, radius, panels + 1), n)
    if d == 1:
        mm = 96 if level is None else 2 * level + 1
        th = 2 * math.pi * np.arange(mm) / mm
        zeta = np.exp(1j * th)[:, None]
        wz = np.full(mm, 2 * math.pi / mm)
    else:
        sph = complex_sphere_rule(2, 20 if level is None else level)
        zeta, wz = sph.nodes, sph.weights
    rho = radial.nodes
    w = (rho[:, None, None] * zeta[None, :, :]).reshape(-1, d)
    weights = (radial.weights * rho ** (2 * d - 1))[:, None] * wz[None, :]
    gw = np.asarray(g(w)) * weights.ravel()
    z = np.asarray(points, dtype=complex)
    zf = z.reshape(-1, d)
    out = np.empty(len(zf), dtype=complex)
    for i, zi in enumerate(zf):
        phase = np.exp(0.5j * np.imag(np.sum(zi * np.conj(w), axis=-1)))
        out[i] = np.sum(np.asarray(f(zi - w)) * gw * phase)
    return out.reshape(z.shape[:-1])


def special_Z(j, g, points, conjugate=False):
    """Apply ``Z_j = d/dz_j + conj(z_j)/4`` (or ``Zbar_j = d/dzbar_j - z_j/4``) to modes.

    With ``s = |z|^2`` and a mode ``P(z) q(s)``::

        Z_j (P q)    = (dP/dz_j) q - (N/2) conj(z_j) P L_{k-1}^{delta+1}(s/2) e^{-s/4}
        Zbar_j (P q) = (dP/dzbar_j) q - (N/2) z_j P L_{k-1}^{delta+1}(s/2) e^{-s/4} - (z_j/2) P q
    """
    d = g.d
    if not 1 <= j <= d:
        raise ValueError(f"j must be in 1..{d}")
    z = np.asarray(points, dtype=complex)
    s = np.sum(np.abs(z) ** 2, axis=-1)
    zj = z[..., j - 1]
    out = np.zeros(z.shape[:-1], dtype=complex)
    for (m, n, jj, k), c in g.coeffs.items():
        delta = d + m + n - 1
        poly = _bigraded_poly(d, m, n, jj)
        p = poly.eval_complex(z)
        q = _radial_q(k, delta, s)
        lower = _phi_norm(k, delta) * laguerre_table(k - 1, delta + 1, 0.5 * s)[k - 1] * np.exp(-0.25 * s) if k > 0 else 0.0
        if conjugate:
            dp = poly.diff(d + j - 1).eval_complex(z)
            val = dp * q - 0.5 * zj * p * lower - 0.5 * zj * p * q
        else:
            dp = poly.diff(j - 1).eval_complex(z)
            val = dp * q - 0.5 * np.conj(zj) * p * lower
        out = out + c * val
    return out


def special_riesz(j, f, points, route="spectral", conjugate=False, **kw):
    """``S_j = Z_j L^{-1/2}`` (``conjugate=True``: ``Zbar_j L^{-1/2}``) at sample points.

    ``spectral``: analytic Z_j on the modes of ``L^{-1/2} f``.
    ``twisted_convolution``: ``f x s_j`` with the subordinated kernel.
    """
    if f.basis != "special_hermite":
        raise ValueError("special_riesz acts on special_hermite expansions")
    route = OperatorRoute(route)
    if route is OperatorRoute.SPECTRAL:
        return special_Z(j, half_inverse(f), points, conjugate=conjugate)
    if route is not OperatorRoute.TWISTED_CONVOLUTION:
        raise ValueError(f"route {route.value} not available for special_riesz")
    nodes, weights = _special_riesz_functional(j, f.d, conjugate, **kw)
    z = np.asarray(points, dtype=complex)
    zf = z.reshape(-1, f.d)
    out = np.empty(len(zf), dtype=complex)
    for i, zi in enumerate(zf):
        phase = np.exp(0.5j * np.imag(np.sum(zi * np.conj(nodes), axis=-1)))
        out[i] = np.sum(weights * phase * synthesize(f, zi - nodes))
    return out.reshape(z.shape[:-1])


@lru_cache(maxsize=16)
def _special_riesz_functional(j, d, conjugate, n=16, angles=96, level=16, reach=14.0, tol=1e-12):
    """Nodes ``w`` and weights so that ``f x s_j (z) ~ sum_i W_i e^{i Im(z.conj w_i)/2} f(z - w_i)``."""
    eps = 2e-3
    radial = graded_rule(eps, reach, n, eps, ratio=2.0)
    fit_rho, fit_w = _small_ball_weights(eps)
    rho = np.concatenate([radial.nodes, fit_rho])
    wr = np.concatenate([radial.weights, fit_w])
    if d == 1:
        th = 2 * math.pi * np.arange(angles) / angles
        zeta = np.exp(1j * th)[:, None]
        wz = np.full(angles, 2 * math.pi / angles)
    elif d == 2:
        sph = complex_sphere_rule(2, level)
        zeta, wz = sph.nodes, sph.weights
    else:
        raise ValueError("unsupported-dimension: special Riesz kernel route supports d in {1, 2}")
    sigma = special_riesz_radial(rho, d, conjugate=conjugate, tol=tol)
    w = rho[:, None, None] * zeta[None, :, :]
    comp = w[..., j - 1]
    kern = (comp if conjugate else np.conj(comp)) * sigma[:, None]
    weights = (wr * rho ** (2 * d - 1))[:, None] * wz[None, :] * kern
    return w.reshape(-1, d), weights.ravel()


# ----------------------------------------------------------------------
# rotations and random inputs


def _check_unitary(k, d):
    k = np.asarray(k)
    if k.shape != (d, d):
        raise ValueError(f"rotation must be {d}x{d}")
    if np.max(np.abs(k.conj().T @ k - np.eye(d))) > 1e-12:
        raise ValueError("invalid-argument: matrix is not orthogonal/unitary")
    return k


def rotate(k, f):
    """``rho(k) f (x) = f(k x)``.

    For a BandLimitedFunction the result is re-expanded exactly (rotations
    preserve the cutoff); a plain callable ``f`` needs ``d`` inferred from ``k``
    and the result is a callable.
    """
    k = np.asarray(k)
    if isinstance(f, BandLimitedFunction):
        _check_unitary(k, f.d)
        if f.basis == "laguerre":
            raise ValueError("rotations act on R^d or C^d expansions")
        fn = lambda p: synthesize(f, np.einsum("ab,...b->...a", k, p))
        return expand(fn, f.basis, f.param, f.cutoff)
    _check_unitary(k, k.shape[0])
    return lambda p: f(np.einsum("ab,...b->...a", k, np.asarray(p)))


def random_band_limited(basis, param, cutoff, rng, modes=None, real=False):
    """Random expansion with standard-normal coefficients on all (or ``modes``) labels."""
    if basis == "hermite":
        labels = _hermite_modes(int(param), cutoff)
    elif basis == "laguerre":
        labels = list(range(cutoff + 1))
    else:
        labels = _special_labels(int(param), cutoff)
    if modes is not None and modes < len(labels):
        idx = sorted(rng.choice(len(labels), size=modes, replace=False))
        labels = [labels[i] for i in idx]
    re = rng.standard_normal(len(labels))
    im = np.zeros(len(labels)) if real else rng.standard_normal(len(labels))
    return BandLimitedFunction(basis, param, {lab: complex(a, b) for lab, a, b in zip(labels, re, im)}, cutoff)
