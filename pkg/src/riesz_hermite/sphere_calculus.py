"""Polar-coordinate calculus on R^d and C^d.

Spherical-harmonic projection, Funk-Hecke and Hecke-Bochner checks, the
radial decomposition of the squared Hermite Riesz transforms, complex
gradients of bigraded harmonics and their identities, radial profiles of
``L^{-1/2} f`` for the special Hermite operator and the five-term
decomposition of ``|Sf|^2 + |Sbar f|^2`` over spheres.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import hecke_bochner_constant
from .kernels import k_small, laguerre_heat, mehler_polar, special_heat
from .operators import (
    ResolutionError,
    expand,
    half_inverse,
    heat_apply,
    hermite_riesz,
    ladder,
    laguerre_riesz,
    rotate,
    special_riesz,
    synthesize,
)
from .quadrature import (
    complex_sphere_rule,
    composite_rule,
    gauss_jacobi,
    halfline_subordination,
    sphere_area,
    sphere_rule,
)
from .specfun import (
    bigraded_basis,
    gegenbauer_norm,
    laguerre_table,
    real_spherical_basis,
)
from .specfun.functions import _phi_norm
from .specfun.poly import Poly

__all__ = [
    "BigradedCoefficientField",
    "ComplexGradients",
    "FiveTermReport",
    "IdentityCheck",
    "SphericalCoefficientField",
    "bigraded_project",
    "circle_identity_check",
    "complex_gradients",
    "five_term",
    "funk_hecke",
    "funk_hecke_check",
    "hecke_bochner_hermite",
    "holomorphic_split",
    "laguerre_link",
    "lambda_exact",
    "lambda_printed",
    "parseval_check",
    "project",
    "prop31_suite",
    "riesz_polar_identity",
    "rotation_covariance_hermite",
    "rotation_covariance_special",
    "semigroup_projection_check",
    "special_F_coeffs",
    "special_profiles",
]

RADIAL_EDGE = 14.0


@dataclass
class IdentityCheck:
    name: str
    residual: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)

    def as_dict(self):
        return {
            "name": self.name,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "detail": self.detail,
        }


def _sup(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _profiles_json(profiles):
    return {
        ",".join(str(v) for v in key): [[complex(c).real, complex(c).imag] for c in vals]
        for key, vals in sorted(profiles.items())
    }


# ----------------------------------------------------------------------
# projections


@dataclass
class SphericalCoefficientField:
    """Radial profiles ``f_{m,j}(r_i)`` of a function on R^d."""

    d: int
    radii: np.ndarray
    profiles: dict
    cutoff: int

    def l2_norm_sq(self, weights):
        """``sum_{m,j} int |f_{m,j}|^2 r^{d-1} dr`` with radial weights on ``radii``."""
        w = np.asarray(weights) * self.radii ** (self.d - 1)
        return float(sum(np.sum(w * np.abs(v) ** 2) for v in self.profiles.values()))

    def to_json(self):
        return json.dumps(
            {"schema": 1, "d": self.d, "radii": list(map(float, self.radii)), "cutoff": self.cutoff,
             "profiles": _profiles_json(self.profiles)},
            sort_keys=True,
        )


@dataclass
class BigradedCoefficientField:
    """Radial profiles ``f^j_{m,n}(r_i)`` of a function on C^d."""

    d: int
    radii: np.ndarray
    profiles: dict
    cutoff: int

    def l2_norm_sq(self, weights):
        w = np.asarray(weights) * self.radii ** (2 * self.d - 1)
        return float(sum(np.sum(w * np.abs(v) ** 2) for v in self.profiles.values()))

    def to_json(self):
        return json.dumps(
            {"schema": 1, "d": self.d, "radii": list(map(float, self.radii)), "cutoff": self.cutoff,
             "profiles": _profiles_json(self.profiles)},
            sort_keys=True,
        )


def _level(level, cutoff, extra):
    level = cutoff + extra if level is None else level
    if level < cutoff:
        raise ResolutionError(f"sphere rule level {level} cannot resolve harmonics of degree {cutoff}")
    return level


def project(f, d, M, radii, level=None):
    """``f_{m,j}(r) = int f(r w) Y_{m,j}(w) dw`` for ``m <= M``.

    ``f`` is a callable on real points ``(N, d)``.  ``level`` is the sphere
    rule level (exact to degree ``2 level``); it must be at least ``M``.
    """
    level = _level(level, M, 8)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    rule = sphere_rule(d, level)
    pts = radii[:, None, None] * rule.nodes[None, :, :]
    vals = np.asarray(f(pts.reshape(-1, d))).reshape(len(radii), -1) * rule.weights[None, :]
    profiles = {}
    for m in range(M + 1):
        for Y in real_spherical_basis(d, m):
            profiles[(m, Y.j)] = vals @ Y(rule.nodes)
    return SphericalCoefficientField(d, radii, profiles, M)


def bigraded_project(f, d, M, radii, level=None, N=None):
    """``f^j_{m,n}(r) = int f(r zeta) conj(Y^j_{m,n}(zeta)) dsigma`` for ``m <= M``, ``n <= N``.

    Bidegrees are also limited to ``m + n <= max(M, N)``.
    """
    N = M if N is None else N
    top = max(M, N)
    level = _level(level, top, 6)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    rule = complex_sphere_rule(d, level)
    pts = radii[:, None, None] * rule.nodes[None, :, :]
    vals = np.asarray(f(pts.reshape(-1, d))).reshape(len(radii), -1) * rule.weights[None, :]
    profiles = {}
    for m in range(M + 1):
        for n in range(N + 1):
            if m + n > top:
                continue
            for Y in bigraded_basis(d, m, n):
                profiles[(m, n, Y.j)] = vals @ np.conj(Y(rule.nodes))
    return BigradedCoefficientField(d, radii, profiles, top)


def _radial_rule(d, edge=RADIAL_EDGE, panels=14, n=16):
    return composite_rule(np.linspace(0.0, edge, panels + 1), n)


def parseval_check(f, tol=1e-8):
    """Parseval for the projection of a band-limited Hermite or special Hermite function."""
    rule = _radial_rule(f.d)
    if f.basis == "hermite":
        field_ = project(f, f.d, f.cutoff, rule.nodes)
    elif f.basis == "special_hermite":
        field_ = bigraded_project(f, f.d, f.cutoff, rule.nodes)
    else:
        raise ValueError("parseval_check needs a hermite or special_hermite expansion")
    total = field_.l2_norm_sq(rule.weights)
    ref = f.norm() ** 2
    return IdentityCheck("parseval", abs(total - ref) / max(ref, 1e-300), tol, {"projected": total, "exact": ref})


# ----------------------------------------------------------------------
# Funk-Hecke and Hecke-Bochner


def funk_hecke(phi, m, d, n=64):
    """``|S^{d-2}| int_{-1}^1 phi(u) P_m(u) (1-u^2)^{(d-3)/2} du``, P_m normalised to 1 at 1."""
    if d < 2:
        raise ValueError("funk_hecke needs d >= 2")
    e = 0.5 * (d - 3)
    rule = gauss_jacobi(n, e, e)
    u = rule.nodes
    return float(sphere_area(d - 1) * np.sum(rule.weights * np.asarray(phi(u)) * gegenbauer_norm(m, d, u)))


def funk_hecke_check(phi, m, d, points, j=1, level=40, tol=1e-9):
    """Compare ``int phi(x.y) Y_{m,j}(y) dy`` (sphere rule) with ``lambda_m Y_{m,j}(x)``."""
    Y = real_spherical_basis(d, m)[j - 1]
    rule = sphere_rule(d, level)
    x = np.asarray(points, dtype=float)
    u = np.clip(x @ rule.nodes.T, -1.0, 1.0)
    lhs = (np.asarray(phi(u)) * Y(rule.nodes)[None, :]) @ rule.weights
    lam = funk_hecke(phi, m, d)
    rhs = lam * Y(x)
    return IdentityCheck("funk_hecke", _sup(lhs - rhs), tol, {"lambda": lam})


def _complement(omega):
    """Orthonormal basis (columns) of the complement of a unit vector."""
    d = len(omega)
    q, _ = np.linalg.qr(np.column_stack([omega, np.eye(d)]))
    return q[:, 1:d]


def _zonal_rule(omega, d, n_u=160, level=8):
    """Sphere rule whose polar axis is ``omega`` (Gauss-Jacobi in ``u = omega.y``)."""
    e = 0.5 * (d - 3)
    ur = gauss_jacobi(n_u, e, e)
    u, wu = ur.nodes, ur.weights
    if d == 2:
        v, wv = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    else:
        inner = sphere_rule(d - 1, level)
        v, wv = inner.nodes, inner.weights
    E = _complement(np.asarray(omega, dtype=float))
    s = np.sqrt(1 - u * u)
    nodes = u[:, None, None] * omega[None, None, :] + s[:, None, None] * (v @ E.T)[None, :, :]
    return nodes.reshape(-1, d), (wu[:, None] * wv[None, :]).ravel()


def hecke_bochner_hermite(g, Y, t, radii, omega=None, tol=1e-8, rel_floor=1e-10):
    """Ratio of ``exp(-tH)(gY)(r w)`` to ``r^m Y(w) T_t^{alpha+m} gtilde(r)``.

    ``g`` is a vectorised radial profile with Gaussian decay.  The left side
    is the Mehler integral in polar coordinates (zonal sphere rule about
    ``w`` times a composite radial rule); the right side integrates the
    Laguerre kernel of type ``alpha + m``, ``alpha = d/2 - 1``, against
    ``gtilde(s) = s^{-m} g(s)``.  The returned constant is the mean ratio.
    """
    d, m = Y.d, Y.m
    alpha = 0.5 * d - 1
    if omega is None:
        cand = sphere_rule(d, m + 2).nodes
        omega = cand[np.argmax(np.abs(Y(cand)))]
    omega = np.asarray(omega, dtype=float)
    omega = omega / np.linalg.norm(omega)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    times = np.atleast_1d(np.asarray(t, dtype=float))
    rad = composite_rule(np.linspace(0.0, RADIAL_EDGE, 29), 20)
    s, ws = rad.nodes, rad.weights
    ang, wa = _zonal_rule(omega, d, level=m + 4)
    u = ang @ omega
    ya = Y(ang) * wa
    gs = np.asarray(g(s))
    with np.errstate(divide="ignore", invalid="ignore"):
        gt = np.where(s > 0, gs / s**m, 0.0)
    yo = float(Y(omega[None, :])[0])
    lhs = np.empty((len(times), len(radii)))
    rhs = np.empty_like(lhs)
    for a, tt in enumerate(times):
        for b, r in enumerate(radii):
            ker = mehler_polar(tt, r, s[:, None], u[None, :], d)
            lhs[a, b] = np.sum((ker @ ya) * gs * ws * s ** (d - 1))
            kl = laguerre_heat(tt, r, s, alpha + m)
            rhs[a, b] = r**m * yo * np.sum(kl * gt * ws * s ** (2 * (alpha + m) + 1))
    keep = np.abs(rhs) > rel_floor * np.max(np.abs(rhs))
    ratio = np.where(keep, lhs / np.where(keep, rhs, 1.0), np.nan)
    vals = ratio[keep]
    const = float(np.mean(vals))
    spread = float((np.max(vals) - np.min(vals)) / abs(const))
    return {
        "ratio": ratio,
        "lhs": lhs,
        "rhs": rhs,
        "constant": const,
        "spread": spread,
        "check": IdentityCheck("hecke_bochner_ratio_spread", spread, tol, {"constant": const, "m": m, "d": d}),
    }


# ----------------------------------------------------------------------
# Hermite Riesz transforms in polar coordinates


def _hermite_gradient(F):
    """``d/dx_j = (A_j - A_j^*) / 2`` on a Hermite expansion."""
    out = []
    for j in range(1, F.d + 1):
        a = ladder(j, "annihilate", F)
        c = ladder(j, "create", F)
        out.append(a.with_coeffs(a.coeffs, c.cutoff) + c.scale(-1.0))
    return [g.scale(0.5) for g in out]


def _radial_derivative_values(F, pts):
    r = np.linalg.norm(pts, axis=-1)
    grads = _hermite_gradient(F)
    return sum(pts[..., j] * synthesize(g, pts) for j, g in enumerate(grads)) / r


def _profiles_with_derivative(F, d, M, radii, level):
    """Projections of ``F`` and of ``dF/dr`` onto the real harmonics."""
    val = project(F, d, M, radii, level)
    der = project(lambda p: _radial_derivative_values(F, p), d, M, radii, level)
    return val, der


def riesz_polar_identity(f, radii, level=None, tol=1e-7):
    """``int sum_j |R_j f(r w)|^2 dw`` against the radial-profile expansion.

    Right side ``sum |(r + d/dr) F_{m,j}|^2 + sum m(m+d-2) r^{-2} |F_{m,j}|^2``
    with ``F = H^{-1/2} f``; ``dF/dr`` comes from the exact Hermite gradient.
    """
    if f.basis != "hermite":
        raise ValueError("riesz_polar_identity needs a hermite expansion")
    d = f.d
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    M = f.cutoff + 1
    level = _level(level, M, 2)
    rule = sphere_rule(d, level)
    lhs = np.zeros(len(radii))
    pts = (radii[:, None, None] * rule.nodes[None, :, :]).reshape(-1, d)
    for j in range(1, d + 1):
        vals = hermite_riesz(j, f, pts).reshape(len(radii), -1)
        lhs += (np.abs(vals) ** 2) @ rule.weights
    F = half_inverse(f)
    val, der = _profiles_with_derivative(F, d, M, radii, level)
    radial_term = np.zeros(len(radii))
    angular_term = np.zeros(len(radii))
    for (m, j), v in val.profiles.items():
        radial_term += np.abs(radii * v + der.profiles[(m, j)]) ** 2
        angular_term += m * (m + d - 2) * np.abs(v) ** 2 / radii**2
    rhs = radial_term + angular_term
    res = _sup(lhs - rhs) / max(_sup(lhs), 1e-300)
    return {
        "radii": radii,
        "lhs": lhs,
        "radial_term": radial_term,
        "angular_term": angular_term,
        "check": IdentityCheck("riesz_polar_identity", res, tol),
    }


def laguerre_link(ftilde, m, d, radii, j=1, tol=1e-6, sub_tol=1e-8):
    """Radial reduction of ``(r + d/dr) F_{m,j}`` to the Laguerre Riesz transform.

    ``ftilde`` is a laguerre(d/2 - 1 + m) expansion; the Hermite input is
    ``f(x) = ftilde(|x|) P(x)`` with ``P`` the solid harmonic of ``Y_{m,j}``.
    Returns two checks: the full identity and the substitution
    ``m r^{m-1} L^{-1/2} ftilde = (m/r) F_{m,j}``.
    """
    alpha = 0.5 * d - 1
    if ftilde.basis != "laguerre" or abs(ftilde.param - (alpha + m)) > 1e-14:
        raise ValueError(f"ftilde must be a laguerre({alpha + m}) expansion")
    Y = real_spherical_basis(d, m)[j - 1]
    P = Y.poly
    kmax = max(ftilde.coeffs, default=0)
    cutoff = m + 2 * kmax

    def fx(x):
        r = np.linalg.norm(x, axis=-1)
        return synthesize(ftilde, r) * P(x)

    f = expand(fx, "hermite", d, cutoff)
    F = half_inverse(f)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    level = cutoff + 2
    val, der = _profiles_with_derivative(F, d, m, radii, level)
    Fm = val.profiles[(m, j)]
    lhs = radii * Fm + der.profiles[(m, j)]
    c = hecke_bochner_constant(d)
    h = half_inverse(ftilde)
    first = c * radii**m * laguerre_riesz(alpha + m, ftilde, radii)
    second = c * m * radii ** (m - 1) * synthesize(h, radii) if m else np.zeros_like(radii)
    scale = max(_sup(lhs), 1e-300)
    return {
        "radii": radii,
        "lhs": lhs,
        "first": first,
        "second": second,
        "check": IdentityCheck("laguerre_link", _sup(lhs - first - second) / scale, tol, {"c_d": c}),
        "substitution": IdentityCheck(
            "laguerre_link_substitution", _sup(second - m * Fm / radii) / scale, sub_tol
        ),
    }


# ----------------------------------------------------------------------
# complex gradients


def _dx(P, j):
    d = P.nvars // 2
    return P.diff(j) + P.diff(d + j)


def _dy(P, j):
    d = P.nvars // 2
    return (P.diff(j) - P.diff(d + j)).scale(1j)


def _coord(d, j, imag):
    z = Poly.variable(2 * d, j)
    zb = Poly.variable(2 * d, d + j)
    if imag:
        return (z - zb).scale(-0.5j)
    return (z + zb).scale(0.5)


def _euler(P):
    return Poly(P.nvars, {e: sum(e) * c for e, c in P.terms.items()})


def _tangential_poly(P, i):
    """``D_i P = d_i P - x_i E P`` for real coordinate ``i`` in ``(x_1..x_d, y_1..y_d)``."""
    d = P.nvars // 2
    j, imag = i % d, i >= d
    deriv = _dy(P, j) if imag else _dx(P, j)
    return deriv - _coord(d, j, imag) * _euler(P)


@dataclass
class ComplexGradients:
    """Gradient components at sample points ``z`` (shape ``(N, d)``)."""

    z: np.ndarray
    grad_z: np.ndarray
    grad_zbar: np.ndarray
    grad0: np.ndarray  # real tangential gradient, (N, 2d) ordered (x, y)
    radial: np.ndarray

    @property
    def grad0_z(self):
        d = self.z.shape[-1]
        return 0.5 * (self.grad0[:, :d] - 1j * self.grad0[:, d:])

    @property
    def grad0_zbar(self):
        d = self.z.shape[-1]
        return 0.5 * (self.grad0[:, :d] + 1j * self.grad0[:, d:])

    def split_residual(self):
        """Sup of ``grad_z - (grad0_z / r + conj(z) dF/dr / (2r))``."""
        r = np.linalg.norm(self.z, axis=-1)[:, None]
        rebuilt = self.grad0_z / r + np.conj(self.z) * self.radial[:, None] / (2 * r)
        return _sup(self.grad_z - rebuilt)


def _real_points(z):
    return np.concatenate([z.real, z.imag], axis=-1)


def _complex_points(x, d):
    return x[..., :d] + 1j * x[..., d:]


def complex_gradients(P, z, h=1e-3):
    """``grad^z``, ``grad^zbar``, the tangential gradient and ``d/dr``.

    ``P`` is a BigradedHarmonic or a Poly over ``(z, zbar)``, differentiated
    exactly, or a callable on complex points, differentiated by fourth-order
    central differences (Cartesian for ``grad^z``, along great circles for
    the tangential part, along rays for ``d/dr``).
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    d = z.shape[-1]
    r = np.linalg.norm(z, axis=-1)
    poly = getattr(P, "poly", P)
    if isinstance(poly, Poly):
        gz = np.stack([poly.diff(j).eval_complex(z) for j in range(d)], axis=-1)
        gzb = np.stack([poly.diff(d + j).eval_complex(z) for j in range(d)], axis=-1)
        dr = _euler(poly).eval_complex(z) / r
        # at radius r the tangential gradient is r (grad - w d/dr)
        x = _real_points(z)
        g0 = []
        for i in range(2 * d):
            j, imag = i % d, i >= d
            deriv = (_dy(poly, j) if imag else _dx(poly, j)).eval_complex(z)
            g0.append(r * deriv - x[:, i] * dr)
        return ComplexGradients(z, gz, gzb, np.stack(g0, axis=-1), dr)
    f = P
    x = _real_points(z)
    steps = np.array([-2, -1, 1, 2])
    coef = np.array([1, -8, 8, -1]) / 12.0

    def fd(path):
        return sum(c * np.asarray(f(path(s * h))) for s, c in zip(steps, coef)) / h

    real_grad = []
    for i in range(2 * d):
        e = np.zeros(2 * d)
        e[i] = 1.0
        real_grad.append(fd(lambda eps: _complex_points(x + eps * e, d)))
    real_grad = np.stack(real_grad, axis=-1)
    gz = 0.5 * (real_grad[:, :d] - 1j * real_grad[:, d:])
    gzb = 0.5 * (real_grad[:, :d] + 1j * real_grad[:, d:])
    w = x / r[:, None]
    dr = fd(lambda eps: _complex_points(x + eps * w, d))
    g0 = []
    for i in range(2 * d):
        v = -w[:, i : i + 1] * w
        v[:, i] += 1.0

        def arc(eps, v=v):
            y = w + eps * v
            return _complex_points(r[:, None] * y / np.linalg.norm(y, axis=-1, keepdims=True), d)

        g0.append(fd(arc))
    return ComplexGradients(z, gz, gzb, np.stack(g0, axis=-1), dr)


def lambda_printed(d, m, n):
    """``((m+n)^2 + (4d-3) m - n) / 4``."""
    return 0.25 * ((m + n) ** 2 + (4 * d - 3) * m - n)


def lambda_exact(d, m, n):
    """``((m+n)^2 + 4(d-1) m) / 4``, the value of ``int |grad0^z Y|^2`` for unit ``Y``."""
    return 0.25 * ((m + n) ** 2 + 4 * (d - 1) * m)


def _herm_inner(a, b):
    """``<a, b> = sum_j a_j conj(b_j)`` along the last axis."""
    return np.sum(a * np.conj(b), axis=-1)


def prop31_suite(P, Q, tol=1e-8, rng=None, samples=24):
    """Bigraded-harmonic gradient identities for ``P`` of bidegree (m, n), ``Q`` of (m', n').

    Pointwise identities are checked at random points of the ball of
    radius 2 (and of the unit sphere where stated); the integral identities
    use ``complex_sphere_rule`` exactly.  Returns a list of IdentityCheck;
    the ``lambda`` entries compare the quadrature against the printed and
    the exact constant.
    """
    d = P.d
    if Q.d != d or d not in (1, 2):
        raise ValueError("unsupported-dimension: prop31_suite needs matching d in {1, 2}")
    if P.m + P.n > 6 or Q.m + Q.n > 6:
        raise ValueError("unsupported-bidegree: m + n must not exceed 6")
    rng = np.random.default_rng(0) if rng is None else rng
    m, n, mq, nq = P.m, P.n, Q.m, Q.n
    p, q = P.poly, Q.poly
    pb, qb = p.conj(), q.conj()

    raw = rng.standard_normal((samples, 2 * d))
    sph_real = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    sph = _complex_points(sph_real, d)
    ball = sph * (0.3 + 1.7 * rng.random(samples))[:, None]
    rb = np.linalg.norm(ball, axis=-1)

    gp = complex_gradients(p, ball)
    gq = complex_gradients(q, ball)
    Pv, Qv = p.eval_complex(ball), q.eval_complex(ball)
    checks = []

    lhs = _herm_inner(np.conj(ball), gp.grad_z)
    checks.append(IdentityCheck("1a_zbar_grad", _sup(lhs - m * np.conj(Pv)), tol))

    lhs = _herm_inner(np.conj(ball), gp.grad0_z)
    checks.append(IdentityCheck("1b_zbar_grad0", _sup(lhs - 0.5 * rb * (m - n) * np.conj(Pv)), tol))

    gpb = complex_gradients(pb, sph)
    xi, eta = sph.real, sph.imag
    lhs = _herm_inner(np.conj(sph), complex_gradients(p, sph).grad0_z)
    rhs = 0.5j * (np.sum(xi * gpb.grad0[:, d:], axis=-1) - np.sum(eta * gpb.grad0[:, :d], axis=-1))
    checks.append(IdentityCheck("1c_sphere_rotation_form", _sup(lhs - rhs), tol))

    lhs = _herm_inner(gp.grad_z, gq.grad_z)
    coef = 0.25 * ((3 * m + n) * mq + (m - n) * nq)
    rhs = _herm_inner(gp.grad0_z, gq.grad0_z) / rb**2 + coef * Pv * np.conj(Qv) / rb**2
    checks.append(IdentityCheck("2_grad_inner_expansion", _sup(lhs - rhs), tol))

    gqb = complex_gradients(qb, ball)
    lhs = _herm_inner(gp.grad0_z, gq.grad0_z)
    a, b = gp.grad0[:, :d], gp.grad0[:, d:]
    c, e = gqb.grad0[:, :d], gqb.grad0[:, d:]
    rhs = 0.25 * np.sum(gp.grad0 * gqb.grad0, axis=-1) + 0.25j * (np.sum(a * e, axis=-1) - np.sum(b * c, axis=-1))
    checks.append(IdentityCheck("3_grad0_pointwise", _sup(lhs - rhs), tol))

    level = (m + n + mq + nq) // 2 + 4
    rule = complex_sphere_rule(d, level)
    zs, ws = rule.nodes, rule.weights
    Dp = [_tangential_poly(p, i) for i in range(2 * d)]
    Dqb = [_tangential_poly(qb, i) for i in range(2 * d)]
    lhs = sum(np.sum(ws * Dp[j].eval_complex(zs) * Dqb[d + j].eval_complex(zs)) for j in range(d))
    second = Poly(2 * d)
    for j in range(d):
        second = second + _tangential_poly(Dp[j], d + j)
    qbv = qb.eval_complex(zs)
    eta_s = zs.imag
    rhs = -np.sum(ws * second.eval_complex(zs) * qbv)
    rhs += (2 * d - 1) * sum(np.sum(ws * eta_s[:, j] * Dp[j].eval_complex(zs) * qbv) for j in range(d))
    checks.append(IdentityCheck("4_integration_by_parts", abs(lhs - rhs), tol))

    g0p = complex_gradients(p, zs).grad0_z
    g0q = complex_gradients(q, zs).grad0_z
    integral = np.sum(ws * _herm_inner(g0p, g0q))
    inner = np.sum(ws * p.eval_complex(zs) * np.conj(q.eval_complex(zs)))
    lp, le = lambda_printed(d, m, n), lambda_exact(d, m, n)
    checks.append(
        IdentityCheck("5_lambda_printed", abs(integral - lp * inner), tol, {"lambda": lp, "integral": [integral.real, integral.imag]})
    )
    checks.append(
        IdentityCheck("5_lambda_exact", abs(integral - le * inner), tol, {"lambda": le, "integral": [integral.real, integral.imag]})
    )
    return checks


# ----------------------------------------------------------------------
# special Hermite radial profiles


def _radial_phi_and_derivative(k, delta, r):
    """``phi_k^delta(r)`` and its r-derivative."""
    s = 0.5 * r * r
    tab = laguerre_table(k, delta, s)[k]
    low = laguerre_table(k - 1, delta + 1, s)[k - 1] if k > 0 else 0.0
    env = _phi_norm(k, delta) * np.exp(-0.5 * s)
    return env * tab, env * (-r * low - 0.5 * r * tab)


def special_profiles(g, radii):
    """Analytic radial profiles ``(F, dF/dr)`` of a special Hermite expansion.

    A mode ``P^j_{m,n}(z) phi_k^delta(|z|)`` contributes
    ``r^{m+n} phi_k^delta(r)`` to the ``(m, n, j)`` profile.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    val, der = {}, {}
    for (m, n, j, k), c in g.coeffs.items():
        delta = g.d + m + n - 1
        ph, dph = _radial_phi_and_derivative(k, delta, radii)
        p = m + n
        rp = radii**p
        drp = p * radii ** (p - 1) if p else np.zeros_like(radii)
        key = (m, n, j)
        val[key] = val.get(key, 0) + c * rp * ph
        der[key] = der.get(key, 0) + c * (drp * ph + rp * dph)
    return val, der


def _subordination_profile(fprof, m, n, d, r, t_rule, nodes=64, edge=RADIAL_EDGE):
    """``pi^{-1/2} int int e^{-t(m-n)} (rs)^{m+n} k_t(r,s) f(s) s^{2d-1} t^{-1/2} ds dt``.

    For each time the s-integral runs over ``r +- 12 sqrt(2 tanh t)`` (clipped
    to ``[0, edge]``), which contains the Gaussian core of ``k_t``.
    """
    delta = d + m + n - 1
    x, w = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for tt, wt in zip(t_rule.nodes, t_rule.weights):
        half = 12.0 * math.sqrt(2.0 * math.tanh(tt))
        a, b = max(0.0, r - half), min(edge, r + half)
        if b <= a:
            continue
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        ws = 0.5 * (b - a) * w
        ker = k_small(tt, r, s, delta)
        inner = np.sum(ws * ker * fprof(s) * (r * s) ** (m + n) * s ** (2 * d - 1))
        total += wt * math.exp(-tt * (m - n)) * inner
    return total / math.sqrt(math.pi)


def special_F_coeffs(f, radii, level=None, tol=1e-8):
    """Profiles of ``L^{-1/2} f`` by projection and by the subordinated double integral.

    Returns the projected field, the double-integral field and the check.
    The double integral uses the projected input profiles ``f^j_{m,n}``.
    """
    if f.basis != "special_hermite":
        raise ValueError("special_F_coeffs needs a special_hermite expansion")
    d = f.d
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    G = half_inverse(f)
    proj = bigraded_project(G, d, f.cutoff, radii, level)
    keys = sorted({(m, n, j) for (m, n, j, _k) in f.coeffs})
    cache = {}

    def fprof(key):
        def fn(s):
            s = np.asarray(s, dtype=float)
            k = (key, s.tobytes())
            if k not in cache:
                fld = bigraded_project(f, d, f.cutoff, s, level)
                for kk, v in fld.profiles.items():
                    cache[(kk, s.tobytes())] = v
            return cache[k]

        return fn

    lam_min = min(2 * (k + m) + d for (m, n, j, k) in f.coeffs)
    t_rule = halfline_subordination(float(lam_min), tol=1e-13)
    dbl = {}
    for key in keys:
        m, n, _ = key
        prof = fprof(key)
        dbl[key] = np.array([_subordination_profile(prof, m, n, d, r, t_rule) for r in radii])
    res = max((_sup(proj.profiles[k] - dbl[k]) for k in keys), default=0.0)
    return {
        "projected": proj,
        "double_integral": BigradedCoefficientField(d, radii, dbl, f.cutoff),
        "check": IdentityCheck("special_F_double_integral", res, tol),
    }


def semigroup_projection_check(f, t, radii, route="twisted_convolution", level=None, tol=1e-8):
    """Projected heat flow against ``e^{-t(m-n)} int f_{m,n}(s) (rs)^{m+n} k_t(r,s) s^{2d-1} ds``."""
    d = f.d
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if route == "spectral":
        ht = heat_apply(f, t)
        lhs = bigraded_project(ht, d, f.cutoff, radii, level)
    else:
        lhs = bigraded_project(lambda z: heat_apply(f, t, route="twisted_convolution", points=z), d, f.cutoff, radii, level)
    rad = composite_rule(np.linspace(0.0, RADIAL_EDGE, 29), 20)
    s = rad.nodes
    fin = bigraded_project(f, d, f.cutoff, s, level)
    res = 0.0
    for (m, n, j), prof in fin.profiles.items():
        delta = d + m + n - 1
        rhs = np.array(
            [math.exp(-t * (m - n)) * np.sum(rad.weights * prof * (r * s) ** (m + n) * k_small(t, r, s, delta) * s ** (2 * d - 1)) for r in radii]
        )
        res = max(res, _sup(lhs.profiles[(m, n, j)] - rhs))
    return IdentityCheck("semigroup_projection", res, tol, {"t": t, "route": route})


def circle_identity_check(d, m, n, j, t, r, s, points=None, variant="corrected", angles=256, level=24, tol=1e-7):
    """Sphere integral of the twisted heat kernel against a bigraded harmonic.

    ``int p_t(r z' - s w') exp(-(i/2) r s Im(z'.conj w')) Y(w') dw'`` is
    compared with ``Y(z') (rs)^{m+n} k_t^delta(r, s) e^{-t(m-n)}``.  The
    ``printed`` variant integrates ``conj(Y(w'))`` instead of ``Y(w')``.
    """
    Y = bigraded_basis(d, m, n)[j - 1]
    if d == 1:
        th = 2 * math.pi * np.arange(angles) / angles
        w = np.exp(1j * th)[:, None]
        ww = np.full(angles, 2 * math.pi / angles)
    else:
        rule = complex_sphere_rule(d, level)
        w, ww = rule.nodes, rule.weights
    if points is None:
        points = np.exp(1j * np.array([0.3, 1.7, 4.0]))[:, None] if d == 1 else complex_sphere_rule(d, 2).nodes[:5]
    zp = np.atleast_2d(np.asarray(points, dtype=complex))
    yw = Y(w)
    if variant == "printed":
        yw = np.conj(yw)
    elif variant != "corrected":
        raise ValueError("variant must be 'corrected' or 'printed'")
    delta = d + m + n - 1
    target = (r * s) ** (m + n) * float(k_small(t, r, s, delta)) * math.exp(-t * (m - n))
    out = []
    for zi in zp:
        diff = r * zi[None, :] - s * w
        phase = np.exp(-0.5j * r * s * np.imag(np.sum(zi[None, :] * np.conj(w), axis=-1)))
        out.append(np.sum(ww * special_heat(t, diff, d) * phase * yw))
    lhs = np.array(out)
    rhs = Y(zp) * target
    return IdentityCheck(f"circle_identity_{variant}", _sup(lhs - rhs), tol, {"scale": abs(target)})


# ----------------------------------------------------------------------
# five-term decomposition


@dataclass
class FiveTermReport:
    radii: np.ndarray
    A1sq: np.ndarray
    A2sq: np.ndarray
    A3sq: np.ndarray
    A4sq: np.ndarray
    A5: np.ndarray
    lhs: np.ndarray
    lambda_form: str = "exact"

    @property
    def rhs(self):
        return self.A1sq + self.A2sq + self.A3sq + self.A4sq + self.A5

    @property
    def residual(self):
        return _sup(self.lhs - self.rhs) / max(_sup(self.lhs), 1e-300)

    def to_json(self):
        data = {k: list(map(float, getattr(self, k))) for k in ("radii", "A1sq", "A2sq", "A3sq", "A4sq", "A5", "lhs")}
        data.update(schema=1, residual=self.residual, lambda_form=self.lambda_form)
        return json.dumps(data, sort_keys=True)


def five_term(f, radii, level=None, lambda_form="exact"):
    """``int (|Sf|^2 + |Sbar f|^2) dsigma`` over spheres against ``A1^2 + ... + A5``.

    The left side integrates the spectral ``S_j f`` and ``Sbar_j f`` over
    ``complex_sphere_rule``; the right side uses the analytic profiles of
    ``F = L^{-1/2} f``.  ``lambda_form`` selects the tangential constant in
    ``A3``/``A4`` (``exact`` or ``printed``); their sum is the same.
    """
    if f.basis != "special_hermite":
        raise ValueError("five_term needs a special_hermite expansion")
    lam = {"exact": lambda_exact, "printed": lambda_printed}[lambda_form]
    d = f.d
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    level = _level(level, f.cutoff + 2, 1)
    rule = complex_sphere_rule(d, level)
    pts = (radii[:, None, None] * rule.nodes[None, :, :]).reshape(-1, d)
    lhs = np.zeros(len(radii))
    for j in range(1, d + 1):
        for conj in (False, True):
            vals = special_riesz(j, f, pts, conjugate=conj).reshape(len(radii), -1)
            lhs += (np.abs(vals) ** 2) @ rule.weights
    val, der = special_profiles(half_inverse(f), radii)
    A = [np.zeros(len(radii)) for _ in range(5)]
    r = radii
    for (m, n, _j), F in val.items():
        dF = der[(m, n, _j)]
        a2 = np.abs(F) ** 2
        A[0] += np.abs(0.5 * (dF + 0.5 * r * F)) ** 2
        A[1] += np.abs(0.5 * (dF - 0.5 * r * F)) ** 2
        A[2] += lam(d, m, n) * a2 / r**2
        A[3] += lam(d, n, m) * a2 / r**2
        A[4] += 0.5 * (m - n) * a2
    return FiveTermReport(radii, *A, lhs=lhs, lambda_form=lambda_form)


def holomorphic_split(f):
    """Split a special Hermite expansion into ``m >= n`` and ``m < n`` modes."""
    if f.basis != "special_hermite":
        raise ValueError("holomorphic_split needs a special_hermite expansion")
    hol = {lab: c for lab, c in f.coeffs.items() if lab[0] >= lab[1]}
    anti = {lab: c for lab, c in f.coeffs.items() if lab[0] < lab[1]}
    return f.with_coeffs(hol), f.with_coeffs(anti)


# ----------------------------------------------------------------------
# rotation covariance


def rotation_covariance_hermite(f, k, u, points, route="spectral", tol=1e-5):
    """``sum u_j R_j f(k x)`` against ``sum (k^{-1} u)_j R_j(rho(k) f)(x)``."""
    k = np.asarray(k, dtype=float)
    x = np.atleast_2d(np.asarray(points, dtype=float))
    u = np.asarray(u, dtype=float)
    kx = x @ k.T
    g = rotate(k, f)
    coef = np.linalg.solve(k, u)
    lhs = sum(u[j] * hermite_riesz(j + 1, f, kx, route=route) for j in range(f.d))
    rhs = sum(coef[j] * hermite_riesz(j + 1, g, x, route=route) for j in range(f.d))
    return IdentityCheck("rotation_covariance_hermite", _sup(lhs - rhs), tol, {"route": route})


def rotation_covariance_special(f, k, w, points, form="corrected", tol=1e-5):
    """``sum conj(w_j) S_j f(k z)`` against ``sum c_j S_j(rho(k) f)(z)``.

    ``form="corrected"`` uses ``c = conj(k^T w)``; ``form="printed"`` uses
    ``c = k w``.  The two agree when ``k`` is real symmetric and ``w`` real.
    """
    k = np.asarray(k, dtype=complex)
    z = np.atleast_2d(np.asarray(points, dtype=complex))
    w = np.asarray(w, dtype=complex)
    kz = z @ k.T
    g = rotate(k, f)
    if form == "corrected":
        coef = np.conj(k.T @ w)
    elif form == "printed":
        coef = k @ w
    else:
        raise ValueError("form must be 'corrected' or 'printed'")
    lhs = sum(np.conj(w[j]) * special_riesz(j + 1, f, kz) for j in range(f.d))
    rhs = sum(coef[j] * special_riesz(j + 1, g, z) for j in range(f.d))
    return IdentityCheck(f"rotation_covariance_special_{form}", _sup(lhs - rhs), tol)
