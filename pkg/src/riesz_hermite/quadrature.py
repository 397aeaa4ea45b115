"""Deterministic quadrature rules.

Every integral in the package goes through one of the rules built here:
Gauss rules on intervals (optionally Jacobi weighted), a graded composite
rule for endpoint layers, the half-line rule used for subordination
integrals ``int_0^oo g(t) t^{-1/2} dt`` and tensor-product rules on the
spheres S^{d-1} and S^{2d-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, roots_jacobi

__all__ = [
    "QuadratureRule",
    "complex_sphere_rule",
    "composite_rule",
    "gauss_interval",
    "gauss_jacobi",
    "graded_rule",
    "halfline_subordination",
    "sphere_area",
    "sphere_rule",
]

MAX_SPHERE_DIM = 4


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights with a domain tag.

    ``nodes`` is 1-d for interval-type domains and ``(N, d)`` for spheres
    (complex ``(N, d)`` for ``complex_sphere``).  ``degree`` is the
    polynomial degree integrated exactly, or ``-1`` when the rule is only
    accurate to a tolerance (composite and half-line rules).
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple
    order: int
    degree: int = -1
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.weights)

    def integrate(self, f):
        """Apply the rule to a vectorised integrand ``f(nodes)``.

        The integrand may return extra trailing axes; the sum runs over the
        leading node axis.
        """
        vals = np.asarray(f(self.nodes))
        return np.tensordot(self.weights, vals, axes=(0, 0))


def _check_order(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"rule order must be a positive integer, got {n!r}")


def gauss_interval(n, a=-1.0, b=1.0):
    """Gauss-Legendre rule with ``n`` nodes on ``[a, b]`` (exact to degree 2n-1)."""
    _check_order(n)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"need finite a < b, got [{a}, {b}]")
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule(
        nodes=half * x + 0.5 * (a + b),
        weights=half * w,
        domain=("interval", float(a), float(b)),
        order=n,
        degree=2 * n - 1,
    )


def gauss_jacobi(n, exp_left, exp_right, a=-1.0, b=1.0):
    """Gauss-Jacobi rule for the weight ``(1-u)^exp_left (1+u)^exp_right``.

    On ``[a, b]`` the weight is ``((b-u)/half)^exp_left ((u-a)/half)^exp_right``
    times the Jacobian, i.e. the reference weight is transported affinely.
    """
    _check_order(n)
    if exp_left <= -1 or exp_right <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    x, w = roots_jacobi(n, exp_left, exp_right)
    half = 0.5 * (b - a)
    return QuadratureRule(
        nodes=half * x + 0.5 * (a + b),
        weights=half * w,
        domain=("jacobi", float(a), float(b), float(exp_left), float(exp_right)),
        order=n,
        degree=2 * n - 1,
    )


def composite_rule(edges, n):
    """Gauss-Legendre with ``n`` nodes on every panel ``[edges[i], edges[i+1]]``."""
    _check_order(n)
    edges = np.asarray(edges, dtype=float)
    if np.any(np.diff(edges) <= 0):
        raise ValueError("panel edges must be strictly increasing")
    x, w = leggauss(n)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (half[:, None] * x[None, :] + mid[:, None]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(
        nodes=nodes,
        weights=weights,
        domain=("interval", float(edges[0]), float(edges[-1])),
        order=n,
        meta={"panels": len(edges) - 1},
    )


def graded_rule(a, b, n, h0, ratio=2.0, exponent=0.0):
    """Composite rule geometrically graded towards the endpoint ``a``.

    Integrates ``g(u) |u - a|^exponent`` over the interval between ``a`` and
    ``b`` (``b`` may lie on either side of ``a``).  Panel widths start at
    ``h0`` next to ``a`` and grow by ``ratio``; the first panel carries the
    Jacobi weight so an integrable power singularity at ``a`` is exact.
    """
    _check_order(n)
    length = abs(b - a)
    if length == 0:
        raise ValueError("degenerate interval")
    if exponent <= -1:
        raise ValueError("endpoint exponent must exceed -1")
    h0 = min(h0, length)
    offsets = [0.0, h0]
    width = h0
    while offsets[-1] < length:
        width *= ratio
        nxt = offsets[-1] + width
        # absorb a thin remainder into the last panel
        if nxt > length or length - nxt < 0.5 * width:
            nxt = length
        offsets.append(nxt)
    offsets = np.array(offsets)
    # first panel, Jacobi weight v^exponent on [0, h0]
    xj, wj = roots_jacobi(n, 0.0, exponent)
    h = offsets[1]
    v0 = 0.5 * h * (xj + 1.0)
    w0 = wj * (0.5 * h) ** (1.0 + exponent)
    if len(offsets) > 2:
        rest = composite_rule(offsets[1:], n)
        v = np.concatenate([v0, rest.nodes])
        w = np.concatenate([w0, rest.weights * rest.nodes**exponent])
    else:
        v, w = v0, w0
    sign = 1.0 if b > a else -1.0
    nodes = a + sign * v
    order_idx = np.argsort(nodes)
    return QuadratureRule(
        nodes=nodes[order_idx],
        weights=w[order_idx],
        domain=("graded", float(min(a, b)), float(max(a, b)), float(a), float(exponent)),
        order=n,
        meta={"panels": len(offsets) - 1},
    )


def halfline_subordination(decay, tol=1e-12, t_min=1e-9, n=16):
    """Rule for ``int_0^oo g(t) t^{-1/2} dt`` with ``|g(t)| <= C exp(-decay t)``.

    With ``t = u^2`` the integral becomes ``int_0^oo 2 g(u^2) du``; the
    u-range is cut where ``exp(-decay u^2) < 1e-2 tol`` and covered by panels
    graded geometrically towards ``u = 0`` down to ``sqrt(t_min)``, so
    integrands with structure at small times (near-diagonal kernels) are
    resolved.  Nodes are returned in the t variable.
    """
    if not decay > 0:
        raise ValueError(f"decay must be positive, got {decay}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    u_max = math.sqrt(math.log(100.0 / tol) / decay)
    h0 = min(math.sqrt(t_min), u_max)
    base = graded_rule(0.0, u_max, n, h0)
    u = base.nodes
    return QuadratureRule(
        nodes=u * u,
        weights=2.0 * base.weights,
        domain=("halfline_sqrt", float(decay)),
        order=n,
        meta={"u_max": u_max, "tol": tol, "t_min": t_min, "panels": base.meta["panels"]},
    )


def sphere_area(d):
    """Surface measure of S^{d-1} in R^d, ``2 pi^{d/2} / Gamma(d/2)``."""
    return 2.0 * math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d))


def _circle(level):
    m = 2 * level + 1
    theta = 2.0 * math.pi * np.arange(m) / m
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return nodes, np.full(m, 2.0 * math.pi / m)


def _sphere_nodes(d, level):
    if d == 2:
        return _circle(level)
    inner_nodes, inner_w = _sphere_nodes(d - 1, level)
    e = 0.5 * (d - 3)
    u, wu = roots_jacobi(level + 1, e, e)
    s = np.sqrt(1.0 - u * u)
    nodes = np.concatenate(
        [
            np.repeat(u, len(inner_w))[:, None],
            (s[:, None, None] * inner_nodes[None, :, :]).reshape(-1, d - 1),
        ],
        axis=1,
    )
    weights = (wu[:, None] * inner_w[None, :]).ravel()
    return nodes, weights


def sphere_rule(d, level):
    """Product rule on S^{d-1}, exact for polynomials of degree <= 2*level.

    The first coordinate is the polar variable (Gauss-Jacobi in
    ``u = cos theta``); the remaining coordinates recurse down to a uniform
    rule on the circle.
    """
    if not isinstance(d, (int, np.integer)) or not 2 <= d <= MAX_SPHERE_DIM:
        raise ValueError(f"unsupported-dimension: sphere_rule supports 2 <= d <= {MAX_SPHERE_DIM}, got {d}")
    _check_order(level)
    nodes, weights = _sphere_nodes(d, level)
    return QuadratureRule(
        nodes=nodes,
        weights=weights,
        domain=("sphere", int(d)),
        order=level,
        degree=2 * level,
    )


def complex_sphere_rule(d, level):
    """Rule on the unit sphere of C^d (S^{2d-1}), nodes as complex ``(N, d)``.

    Real coordinates are ordered ``(x_1..x_d, y_1..y_d)`` with ``z = x + iy``.
    """
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= 2:
        raise ValueError(f"unsupported-dimension: complex_sphere_rule supports d in {{1, 2}}, got {d}")
    real = sphere_rule(2 * d, level)
    nodes = real.nodes[:, :d] + 1j * real.nodes[:, d:]
    return QuadratureRule(
        nodes=nodes,
        weights=np.array(real.weights),
        domain=("complex_sphere", int(d)),
        order=level,
        degree=2 * level,
    )
