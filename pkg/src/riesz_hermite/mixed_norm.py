"""Measures, A_p weights, mixed norms and quantitative estimate probes.

Everything here is evidence gathering: ratios of kernels to their claimed
decay rates, Hormander-type integrals and empirical operator-norm ratios.
None of it proves an inequality.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .kernels import (
    NearDiagonalError,
    diag_cutoff,
    hermite_riesz_ab,
    hermite_riesz_kernel,
    projected_kernel_Km,
)
from .operators import (
    BandLimitedFunction,
    _special_labels,
    half_inverse,
    hermite_riesz,
    laguerre_riesz,
    random_band_limited,
    special_mode,
    special_Z,
    synthesize,
)
from .quadrature import (
    complex_sphere_rule,
    composite_rule,
    gauss_interval,
    graded_rule,
    halfline_subordination,
    sphere_area,
    sphere_rule,
)
from .specfun import multi_indices, real_spherical_basis
from .sphere_calculus import _radial_phi_and_derivative, holomorphic_split, lambda_exact

__all__ = [
    "OPERATORS",
    "APResult",
    "RatioReport",
    "WeightSpec",
    "ap_constant",
    "ap_profile",
    "ball_comparability",
    "ball_measure",
    "default_family",
    "hormander_report",
    "kernel_decay_report",
    "lemma24_integral",
    "lemma24_report",
    "mixed_norm",
    "mu_alpha",
    "negative_control",
    "norm_ratio_experiment",
    "radial_bridging_probe",
    "refined_family",
]


# ----------------------------------------------------------------------
# measures


def mu_alpha(a, b, alpha):
    """``mu_alpha([a, b]) = (b^{2a+2} - a^{2a+2}) / (2 alpha + 2)``."""
    if a < 0:
        raise ValueError("invalid-argument: interval must lie in [0, oo)")
    if b < a:
        raise ValueError("invalid-argument: need a <= b")
    e = 2 * alpha + 2
    return (b**e - a**e) / e


def ball_measure(r, delta, alpha):
    """``mu_alpha`` of the ball ``B(r, delta)`` clipped at 0."""
    if r <= 0 or delta <= 0:
        raise ValueError("invalid-argument: r and delta must be positive")
    return mu_alpha(max(r - delta, 0.0), r + delta, alpha)


def ball_comparability(d, n=40, lo=-3.0, hi=3.0):
    """Range of ``|r-s| (r^2+s^2)^{(d-1)/2} / mu_{d/2-1}(B(r, |r-s|))`` on a log grid."""
    g = np.logspace(lo, hi, n)
    alpha = 0.5 * d - 1
    vals = []
    for r in g:
        for s in g:
            if r == s:
                continue
            vals.append(abs(r - s) * (r * r + s * s) ** (0.5 * (d - 1)) / ball_measure(r, abs(r - s), alpha))
    return float(min(vals)), float(max(vals))


# ----------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightSpec:
    """Radial weight: ``power`` (``r^gamma``) or ``tabulated`` (log-log interpolation)."""

    kind: str = "power"
    gamma: float = 0.0
    grid: tuple = ()
    values: tuple = ()
    alpha: float = 0.0
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("power", "tabulated"):
            raise ValueError("weight kind must be 'power' or 'tabulated'")
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if self.alpha < -0.5:
            raise ValueError("alpha must be >= -1/2")
        if self.kind == "tabulated":
            if len(self.grid) != len(self.values) or len(self.grid) < 2:
                raise ValueError("tabulated weight needs matching grid and values")
            if min(self.values) <= 0 or min(self.grid) <= 0 or np.any(np.diff(self.grid) <= 0):
                raise ValueError("tabulated weight needs positive values on an increasing positive grid")

    @classmethod
    def power(cls, gamma, alpha=0.0, p=2.0):
        return cls("power", float(gamma), alpha=float(alpha), p=float(p))

    @classmethod
    def unit(cls, alpha=0.0, p=2.0):
        return cls.power(0.0, alpha, p)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "power":
            with np.errstate(divide="ignore"):
                return r**self.gamma
        lg, lv = np.log(self.grid), np.log(self.values)
        return np.exp(np.interp(np.log(r), lg, lv))

    def as_dict(self):
        return asdict(self)

    @property
    def dual_exponent(self):
        """``p'/p = 1/(p-1)``."""
        return 1.0 / (self.p - 1.0)

    def admissible_range(self):
        """Power-weight range ``(-(2a+2), (2a+2)(p-1))``."""
        e = 2 * self.alpha + 2
        return -e, e * (self.p - 1)


def default_family(levels=(-5, 5), rel=(-8, 2)):
    """Balls ``B(2^k, 2^j 2^k)`` clipped at 0 (dyadic centres and relative radii)."""
    out = []
    for k in range(levels[0], levels[1] + 1):
        c = 2.0**k
        for j in range(rel[0], rel[1] + 1):
            rad = c * 2.0**j
            out.append((max(c - rad, 0.0), c + rad))
    return out


def refined_family(level):
    """Intervals ``[2^{-i}, 1]`` and ``[1, 2^i]`` for ``i <= level``; they probe 0 and infinity."""
    out = []
    for i in range(1, level + 1):
        out.append((2.0**-i, 1.0))
        out.append((1.0, 2.0**i))
    return out


def _power_moment(a, b, e):
    """``int_a^b r^{e-1} dr`` (inf when divergent)."""
    if e == 0:
        return math.inf if a == 0 else math.log(b / a)
    if a == 0 and e < 0:
        return math.inf
    return (b**e - a**e) / e


def _weighted_average(w, a, b, expo, n=24):
    """``mu_alpha(Q)^{-1} int_Q w^expo dmu_alpha`` over ``Q = [a, b]``."""
    al = w.alpha
    mass = mu_alpha(a, b, al)
    if w.kind == "power":
        return _power_moment(a, b, w.gamma * expo + 2 * al + 2) / mass
    if a == 0:
        rule = graded_rule(0.0, b, n, 1e-6 * b, exponent=2 * al + 1)
        vals = w(rule.nodes) ** expo
        return float(np.sum(rule.weights * vals)) / mass
    rule = composite_rule(np.geomspace(a, b, 9), n)
    return float(np.sum(rule.weights * w(rule.nodes) ** expo * rule.nodes ** (2 * al + 1))) / mass


@dataclass
class APResult:
    constant: float
    worst: tuple
    per_interval: list
    nonintegrable: list

    @property
    def finite(self):
        return math.isfinite(self.constant)

    def as_dict(self):
        return {
            "constant": self.constant if self.finite else "inf",
            "worst": list(self.worst),
            "nonintegrable": [list(q) for q in self.nonintegrable],
            "intervals": len(self.per_interval),
        }


def ap_constant(w, family=None):
    """``max_Q (avg_Q w)(avg_Q w^{-p'/p})^{p-1}`` over the interval family, averages under ``mu_alpha``."""
    family = default_family() if family is None else family
    vals, bad = [], []
    for a, b in family:
        if not 0 <= a < b:
            raise ValueError("intervals must satisfy 0 <= a < b")
        v1 = _weighted_average(w, a, b, 1.0)
        v2 = _weighted_average(w, a, b, -w.dual_exponent)
        val = v1 * v2 ** (w.p - 1)
        if not math.isfinite(val):
            bad.append((a, b))
        vals.append(val)
    i = int(np.argmax(vals))
    return APResult(float(vals[i]), family[i], vals, bad)


def ap_profile(gammas, alpha, p, family=None):
    """``ap_constant`` of ``r^gamma`` for each gamma."""
    return [ap_constant(WeightSpec.power(g, alpha, p), family).constant for g in gammas]


def radial_bridging_probe(w, d, annuli=None, level=12, n=24):
    """Averages of a radial weight over annuli in R^d against ``mu_{d/2-1}`` interval averages.

    The d-dimensional side integrates ``w(|x|)`` with a product rule
    (sphere rule times Gauss-Legendre in the radius) divided by the annulus
    volume; returns the sup relative difference.
    """
    annuli = [(0.25, 0.5), (0.5, 2.0), (1.0, 1.5), (2.0, 7.0), (0.1, 3.0)] if annuli is None else annuli
    alpha = 0.5 * d - 1
    wa = WeightSpec(w.kind, w.gamma, w.grid, w.values, alpha, w.p)
    sph = sphere_rule(d, level)
    worst = 0.0
    for a, b in annuli:
        rad = gauss_interval(n, a, b)
        pts = rad.nodes[:, None, None] * sph.nodes[None]
        vals = w(np.linalg.norm(pts, axis=-1))
        integral = np.sum(rad.weights[:, None] * sph.weights[None, :] * vals * rad.nodes[:, None] ** (d - 1))
        volume = sphere_area(d) * (b**d - a**d) / d
        ref = _weighted_average(wa, a, b, 1.0)
        worst = max(worst, abs(integral / volume - ref) / abs(ref))
    return worst


# ----------------------------------------------------------------------
# mixed norms


def _radial_grid(w, D, edge, h0=1e-4, n=16):
    expo = w.gamma + D - 1 if w.kind == "power" else D - 1
    if expo <= -1:
        raise ValueError("weight not locally integrable at 0 against r^{D-1} dr")
    rule = graded_rule(0.0, edge, n, h0, ratio=2.0, exponent=expo)
    wfac = np.ones_like(rule.nodes) if w.kind == "power" else w(rule.nodes) * rule.nodes ** (D - 1)
    return rule.nodes, rule.weights * wfac


def _mixed_from_angular(ang_sq, nodes_w, p):
    return float(np.sum(nodes_w * np.maximum(ang_sq, 0.0) ** (0.5 * p))) ** (1.0 / p)


def mixed_norm(f, p, w, d, complex_space=False, edge=None, level=None, cutoff=8):
    """``(int (int_S |f(r w)|^2 dw)^{p/2} w(r) r^{D-1} dr)^{1/p}``.

    ``D = d`` on R^d and ``D = 2d`` on C^d.  ``f`` is a callable on
    points (real ``(N, d)`` or complex ``(N, d)``) or a BandLimitedFunction.
    ``level`` defaults to ``cutoff + 2`` where ``cutoff`` bounds the angular
    degree of ``f``.
    """
    if isinstance(f, BandLimitedFunction):
        cutoff = f.cutoff
        complex_space = f.basis == "special_hermite"
    D = 2 * d if complex_space else d
    edge = (16.0 if complex_space else 12.0) if edge is None else edge
    level = cutoff + 2 if level is None else level
    rule = complex_sphere_rule(d, level) if complex_space else sphere_rule(d, level)
    r, rw = _radial_grid(w, D, edge)
    pts = (r[:, None, None] * rule.nodes[None]).reshape(-1, d)
    vals = np.asarray(f(pts)).reshape(len(r), -1)
    ang = (np.abs(vals) ** 2) @ rule.weights
    return _mixed_from_angular(ang, rw, p)


# ----------------------------------------------------------------------
# reports


@dataclass
class RatioReport:
    """Per-trial (or per-sample) ratios with summary statistics and provenance."""

    operator: str
    p: float
    weight: dict
    ratios: list
    metadata: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    @property
    def max(self):
        return float(np.max(self.ratios)) if self.ratios else 0.0

    def summary(self):
        a = np.asarray(self.ratios, dtype=float)
        if not a.size:
            return {"count": 0}
        return {
            "count": int(a.size),
            "max": float(a.max()),
            "min": float(a.min()),
            "median": float(np.quantile(a, 0.5)),
            "q90": float(np.quantile(a, 0.9)),
        }

    def as_dict(self):
        return {
            "schema": 1,
            "operator": self.operator,
            "p": self.p,
            "weight": self.weight,
            "ratios": [float(v) for v in self.ratios],
            "inputs": [float(v) for v in self.inputs],
            "outputs": [float(v) for v in self.outputs],
            "summary": self.summary(),
            "metadata": self.metadata,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(data["operator"], data["p"], data["weight"], data["ratios"], data["metadata"], data["inputs"], data["outputs"])

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["trial", "input", "output", "ratio"])
        for i, rat in enumerate(self.ratios):
            inp = self.inputs[i] if i < len(self.inputs) else ""
            out = self.outputs[i] if i < len(self.outputs) else ""
            wr.writerow([i, repr(float(inp)) if inp != "" else "", repr(float(out)) if out != "" else "", repr(float(rat))])
        return buf.getvalue()


# ----------------------------------------------------------------------
# kernel decay


def _zonal_theta_rule(gap, n=12):
    """Polar-angle rule graded towards the pole; ``gap`` sets the first panel."""
    return graded_rule(0.0, math.pi, n, max(min(gap, 0.1), 1e-8))


def _azimuth(d, m=16):
    if d == 2:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 3:
        th = 2 * math.pi * np.arange(m) / m
        return np.stack([np.cos(th), np.sin(th)], axis=1), np.full(m, 2 * math.pi / m)
    rule = sphere_rule(d - 1, 6)
    return rule.nodes, rule.weights


def _complement(omega):
    d = len(omega)
    q, _ = np.linalg.qr(np.column_stack([omega, np.eye(d)]))
    return q[:, 1:d]


def _sample_directions(d, j, k=7):
    """Unit vectors with ``omega_j`` spread over [-1, 1] (the row integrals depend only on it)."""
    out = []
    for c in np.linspace(-1.0, 1.0, k):
        v = np.zeros(d)
        v[j - 1] = c
        other = (j % d)
        v[other] = math.sqrt(max(1 - c * c, 0.0))
        out.append(v)
    return out


def _row_integral_max(A, B, theta, d, j):
    """``max_omega int |omega_j A(u) + omega'_j B(u)| domega'`` with ``u = omega.omega'``.

    ``A``, ``B`` are sampled on the polar-angle nodes of ``theta``.
    """
    v, wv = _azimuth(d)
    u = np.cos(theta.nodes)
    s = np.sin(theta.nodes)
    wt = theta.weights * s ** (d - 2)
    best = 0.0
    for om in _sample_directions(d, j):
        E = _complement(om)
        ej = (v @ E.T)[:, j - 1]
        opj = u[:, None] * om[j - 1] + s[:, None] * ej[None, :]
        val = np.abs(om[j - 1] * A[:, None] + opj * B[:, None])
        best = max(best, float(np.sum(wt[:, None] * wv[None, :] * val)))
    return best


def _riesz_ab_on_theta(r, s, theta, d, rule):
    u = np.cos(theta.nodes)
    return hermite_riesz_ab(r, s, u, d, rule=rule)


def _operator_proxy(j, r, s, d, rule):
    """``sup_w int |R_j(r w, s w')| dw'`` (the Schur row bound)."""
    theta = _zonal_theta_rule(0.05 * abs(r - s) / max(r, s))
    a, b = _riesz_ab_on_theta(r, s, theta, d, rule)
    return _row_integral_max(r * a, s * b, theta, d, j)


KERNEL_TAGS = ("riesz_pointwise", "riesz_gradient", "riesz_operator", "km", "km_derivative")


def kernel_decay_report(tag, d=2, j=1, m=0, samples=1000, seed=0, radius=3.0):
    """Sup over random off-diagonal samples of the kernel times its claimed decay normaliser.

    ``riesz_pointwise``  ``|R_j(x,y)| |x-y|^d``
    ``riesz_gradient``   ``|grad_x R_j(x,y)| |x-y|^{d+1}`` (central differences)
    ``riesz_operator``   ``sup_w int |R_j(rw, sw')| dw' * mu(B(r,|r-s|))``
    ``km``               ``|(d/dr + r) K_m(r,s)| * mu(B(r,|r-s|))``
    ``km_derivative``    ``|d/dr (d/dr + r) K_m(r,s)| |r-s| mu(B(r,|r-s|))``
    """
    if tag not in KERNEL_TAGS:
        raise ValueError(f"unknown kernel tag {tag!r}")
    rng = np.random.default_rng(seed)
    alpha = 0.5 * d - 1
    rule = halfline_subordination(float(d), tol=1e-10)
    ratios = []
    if tag in ("riesz_pointwise", "riesz_gradient"):
        x = rng.uniform(-radius, radius, (samples, d))
        dirs = rng.standard_normal((samples, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dist = np.exp(rng.uniform(math.log(5e-2), math.log(radius), samples))
        y = x + dist[:, None] * dirs
        for xi, yi, di in zip(x, y, dist):
            if di < 2 * diag_cutoff(xi):
                raise NearDiagonalError("sample too close to the diagonal")
            if tag == "riesz_pointwise":
                val = abs(float(hermite_riesz_kernel(j, xi, yi[None], d=d, rule=rule)[0])) * di**d
            else:
                h = 1e-3 * di
                g = []
                for i in range(d):
                    e = np.zeros(d)
                    e[i] = h
                    pts = np.stack([xi + e, xi - e])
                    kp = hermite_riesz_kernel(j, pts[0], yi[None], d=d, rule=rule)[0]
                    km = hermite_riesz_kernel(j, pts[1], yi[None], d=d, rule=rule)[0]
                    g.append((kp - km) / (2 * h))
                val = float(np.linalg.norm(g)) * di ** (d + 1)
            ratios.append(val)
    else:
        r = np.exp(rng.uniform(math.log(0.05), math.log(4.0), samples))
        gap = np.exp(rng.uniform(math.log(1e-2), math.log(3.0), samples)) * rng.choice([-1.0, 1.0], samples)
        s = np.abs(r + gap)
        cut = 2e-3 * (1 + r)
        s = np.where(np.abs(s - r) < cut, r + cut + 1e-2, s)
        mb = np.array([ball_measure(ri, abs(ri - si), alpha) for ri, si in zip(r, s)])
        if tag == "riesz_operator":
            ratios = [_operator_proxy(j, ri, si, d, rule) * b for ri, si, b in zip(r, s, mb)]
        elif tag == "km":
            ratios = list(np.abs(projected_kernel_Km(m, r, s, d, deriv=1)) * mb)
        else:
            h = 1e-3 * np.abs(r - s)
            dp = projected_kernel_Km(m, r + h, s, d, deriv=1)
            dm = projected_kernel_Km(m, r - h, s, d, deriv=1)
            ratios = list(np.abs((dp - dm) / (2 * h)) * np.abs(r - s) * mb)
    return RatioReport(
        tag,
        0.0,
        {},
        [float(v) for v in ratios],
        {"d": d, "j": j, "m": m, "samples": samples, "seed": seed},
    )


# ----------------------------------------------------------------------
# the auxiliary integral


def lemma24_integral(A, B, c, lam, n=16):
    """``int_0^1 (1-u)^{c-1/2} (A - B u)^{-(c + lam + 1/2)} du``.

    Composite Gauss rule graded towards ``u = 1`` with the endpoint power
    carried by the first panel's Jacobi weight; the grading scale is
    ``(A - B) / B``, the width of the peak of the second factor.
    """
    if not (c >= 0.5 and 0 < B < A and lam > 0):
        raise ValueError("invalid-argument: need c >= 1/2, 0 < B < A, lambda > 0")
    h0 = min(1.0, 0.25 * (A - B) / B)
    rule = graded_rule(1.0, 0.0, n, h0, exponent=c - 0.5)
    u = rule.nodes
    return float(np.sum(rule.weights * (A - B * u) ** (-(c + lam + 0.5))))


def lemma24_report(samples=1000, seed=0, c_range=(0.5, 3.0), lam_range=(0.1, 2.0)):
    """``LHS * A^{c+1/2} (A-B)^lambda`` over random admissible tuples."""
    rng = np.random.default_rng(seed)
    ratios, tuples = [], []
    for _ in range(samples):
        A = 10 ** rng.uniform(-2, 2)
        rho = 1 - 10 ** rng.uniform(-6, 0)
        B = A * min(max(rho, 1e-6), 1 - 1e-12)
        c = rng.uniform(*c_range)
        lam = rng.uniform(*lam_range)
        val = lemma24_integral(A, B, c, lam) * A ** (c + 0.5) * (A - B) ** lam
        ratios.append(val)
        tuples.append((A, B, c, lam))
    return RatioReport("lemma24", 0.0, {}, ratios, {"samples": samples, "seed": seed, "c_range": c_range, "lam_range": lam_range})


# ----------------------------------------------------------------------
# Hormander conditions for the operator-valued Riesz kernel


def _difference_norm(j, d, rule, x_r, y_r1, y_r2, theta):
    """Schur bound for the sphere operator with kernel ``R_j(x w, y1 w') - R_j(x w, y2 w')``.

    ``x_r`` etc. are radii; the order of arguments places the first one as
    the output variable.  Returns ``sqrt(row_sup * col_sup)``.
    """
    a1, b1 = _riesz_ab_on_theta(x_r, y_r1, theta, d, rule)
    a2, b2 = _riesz_ab_on_theta(x_r, y_r2, theta, d, rule)
    A = x_r * (a1 - a2)
    B = y_r1 * b1 - y_r2 * b2
    row = _row_integral_max(A, B, theta, d, j)
    col = _row_integral_max(B, A, theta, d, j)
    return math.sqrt(row * col)


def _hormander_single(j, d, s, t, transposed, edge, rule, n=12):
    alpha = 0.5 * d - 1
    gap = 2 * abs(s - t)
    pieces = []
    if s - gap > 0:
        pieces.append(graded_rule(s - gap, 0.0, n, min(0.05 * gap, s - gap) if s - gap > 0 else 0.05 * gap))
    pieces.append(graded_rule(s + gap, edge, n, 0.05 * gap))
    total = 0.0
    for pr in pieces:
        for r, wr in zip(pr.nodes, pr.weights):
            theta = _zonal_theta_rule(0.05 * abs(r - s) / max(r, s))
            if transposed:
                val = _difference_norm(j, d, rule, s, r, r, theta) if s == t else _transposed_norm(j, d, rule, r, s, t, theta)
            else:
                val = _difference_norm(j, d, rule, r, s, t, theta)
            total += wr * val * r ** (2 * alpha + 1)
    return total


def _transposed_norm(j, d, rule, r, s, t, theta):
    """Schur bound for ``R_j(s w, r w') - R_j(t w, r w')``."""
    a1, b1 = _riesz_ab_on_theta(s, r, theta, d, rule)
    a2, b2 = _riesz_ab_on_theta(t, r, theta, d, rule)
    A = s * a1 - t * a2
    B = r * (b1 - b2)
    row = _row_integral_max(A, B, theta, d, j)
    col = _row_integral_max(B, A, theta, d, j)
    return math.sqrt(row * col)


def hormander_report(d=3, j=1, pairs=None, samples=50, seed=0, edge=None, transposed=False):
    """Hormander integrals ``int_{|r-s| > 2|s-t|} ||K(r,s) - K(r,t)|| dmu(r)`` for sampled ``(s, t)``.

    The operator norm on ``L^2(S^{d-1})`` is bounded by the Schur test.
    Integration stops at ``edge`` (default ``max(s, t) + 8``), beyond which
    the Gaussian factor of the Mehler kernel keeps the integrand below
    ``1e-14`` of its peak.
    """
    rule = halfline_subordination(float(d), tol=1e-8)
    if pairs is None:
        rng = np.random.default_rng(seed)
        s = np.exp(rng.uniform(math.log(0.1), math.log(3.0), samples))
        t = s * (1 + rng.uniform(-0.3, 0.3, samples))
        pairs = list(zip(s, t))
    vals = []
    for s, t in pairs:
        if s == t:
            vals.append(0.0)
            continue
        e = max(s, t) + 8.0 if edge is None else edge
        vals.append(_hormander_single(j, d, s, t, transposed, e, rule))
    return RatioReport(
        "hormander_transposed" if transposed else "hormander",
        0.0,
        {},
        vals,
        {"d": d, "j": j, "pairs": [[float(a), float(b)] for a, b in pairs], "edge": edge},
    )



# ----------------------------------------------------------------------
# empirical norm-ratio experiments

OPERATORS = ("R_j", "S_j", "laguerre_vector", "A1", "A2", "A3", "A4", "A5", "ineq_A", "ineq_B", "ineq_C")
SPECIAL_OPERATORS = ("S_j", "A1", "A2", "A3", "A4", "A5")
DEFAULT_CUTOFF = {"R_j": 8, "S_j": 3, "laguerre_vector": 4, "ineq_A": 5, "ineq_B": 5, "ineq_C": 5}


@dataclass
class _Profiles:
    """Angular square integrals of inputs and outputs on a shared radial grid."""

    r: np.ndarray
    base: np.ndarray
    D: int
    ins: np.ndarray
    outs: np.ndarray

    def norms(self, w, p):
        rw = self.base * w(self.r) * self.r ** (self.D - 1)
        ins = [_mixed_from_angular(a, rw, p) for a in self.ins]
        outs = [_mixed_from_angular(a, rw, p) for a in self.outs]
        return ins, outs


_PROFILE_CACHE = {}


def _base_radial(edge, h0=1e-5, n=16):
    rule = graded_rule(0.0, edge, n, h0, ratio=2.0)
    return rule.nodes, rule.weights


def _sphere_grid(d, complex_space, level, r):
    rule = complex_sphere_rule(d, level) if complex_space else sphere_rule(d, level)
    pts = (r[:, None, None] * rule.nodes[None]).reshape(-1, d)
    return rule, pts


def _angular(vals, rule, R):
    """Angular square integrals per trial; ``vals`` is ``(R * S, T)``."""
    v = np.abs(vals.reshape(R, len(rule.weights), -1)) ** 2
    return np.einsum("rst,s->tr", v, rule.weights)


def _real_matmul(mat, c):
    both = mat @ np.ascontiguousarray(np.concatenate([c.real, c.imag], axis=1))
    T = c.shape[1]
    return both[:, :T] + 1j * both[:, T:]


def _trial_rngs(seed, trials):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _profiles(operator, d, j, cutoff, seed, trials):
    key = (operator, d, j, cutoff, seed, trials)
    if key not in _PROFILE_CACHE:
        rngs = _trial_rngs(seed, trials)
        if operator == "R_j":
            out = _hermite_profiles(d, j, cutoff, rngs)
        elif operator == "laguerre_vector":
            out = _laguerre_vector_profiles(d, cutoff, rngs)
        elif operator in SPECIAL_OPERATORS:
            out = _special_profiles(operator, d, j, cutoff, rngs)
        else:
            out = _hermite_radial_profiles(operator, d, cutoff, rngs)
        _PROFILE_CACHE[key] = out
    return _PROFILE_CACHE[key]


def _check_weight(w, allow):
    res = ap_constant(w)
    if not res.finite and not allow:
        raise ValueError(f"inadmissible weight: A_p constant infinite on intervals {res.nonintegrable[:3]}")
    return res


def norm_ratio_experiment(operator, p=2.0, w=None, trials=100, seed=0, d=None, j=1, cutoff=None, allow_inadmissible=False):
    """Output/input mixed-norm ratios on seeded random band-limited inputs.

    ``R_j``: Hermite Riesz transform on R^d (``|mu| <= cutoff``, default 8).
    ``S_j``: special Hermite Riesz transform on C^d (``2k + m + n <= 3``).
    ``laguerre_vector``: ``(sum_m r^{2m} |R^{alpha+m} ftilde_m|^2)^{1/2}`` against
    ``(sum_m |f_m|^2)^{1/2}``, ``f_m = r^m ftilde_m``, ``m < cutoff``.
    ``A1`` .. ``A5``: the five-term radial functions of ``f_h`` (the
    ``m >= n`` part); ``A_k(r)`` is the square root of the k-th term.
    ``ineq_A``, ``ineq_B``, ``ineq_C``: the Hermite radial inequalities for
    ``(r + d/dr) F_{m,j}``, ``sqrt(m(m+d-2)) F_{m,j} / r`` and ``(m/r) F_{m,j}``
    with ``F = H^{-1/2} f``.

    Each trial draws its input from its own child of ``SeedSequence(seed)``,
    so trials are independent of evaluation order.  The weight's ``alpha``
    is replaced by the one matching the operator's measure.
    """
    if operator not in OPERATORS:
        raise ValueError(f"unknown operator {operator!r}")
    special = operator in SPECIAL_OPERATORS
    if d is None:
        d = 1 if special else 3
    alpha = d - 1 if special else 0.5 * d - 1
    w = WeightSpec.unit(alpha, p) if w is None else w
    w = WeightSpec(w.kind, w.gamma, w.grid, w.values, alpha, p)
    ap = _check_weight(w, allow_inadmissible)
    cutoff = DEFAULT_CUTOFF.get(operator, 3) if cutoff is None else cutoff
    prof = _profiles(operator, d, j, cutoff, seed, trials)
    ins, outs = prof.norms(w, p)
    meta = {
        "d": d,
        "j": j,
        "seed": seed,
        "trials": trials,
        "cutoff": cutoff,
        "ap_constant": ap.constant if ap.finite else "inf",
        "allow_inadmissible": allow_inadmissible,
    }
    ratios = [o / i for i, o in zip(ins, outs)]
    return RatioReport(operator, p, w.as_dict(), ratios, meta, ins, outs)


def negative_control(operator="R_j", p=2.0, gamma=None, edges=(1e-2, 1e-4, 1e-6), trials=20, seed=0, d=None):
    """Max ratio for an inadmissible power weight as the radial grid starts closer to 0.

    The default ``gamma`` sits just beyond the upper end of the admissible
    range.  Returns ``[(edge, max ratio)]``.
    """
    special = operator in SPECIAL_OPERATORS
    d = (1 if special else 3) if d is None else d
    alpha = d - 1 if special else 0.5 * d - 1
    if gamma is None:
        gamma = (2 * alpha + 2) * (p - 1) + 0.5
    w = WeightSpec.power(gamma, alpha, p)
    prof = _profiles(operator, d, 1, DEFAULT_CUTOFF.get(operator, 3), seed, trials)
    out = []
    for e in edges:
        keep = prof.r >= e
        sub = _Profiles(prof.r[keep], prof.base[keep], prof.D, prof.ins[:, keep], prof.outs[:, keep])
        ins, outs = sub.norms(w, p)
        out.append((e, max(o / i for i, o in zip(ins, outs))))
    return out


def _hermite_mode_matrix(d, cutoff, pts):
    labels = multi_indices(d, cutoff)
    cols = [synthesize(BandLimitedFunction("hermite", d, {mu: 1.0}, cutoff), pts).real for mu in labels]
    return labels, np.stack(cols, axis=1)


def _hermite_profiles(d, j, cutoff, rngs):
    r, base = _base_radial(12.0)
    rule, pts = _sphere_grid(d, False, cutoff + 2, r)
    labels, mat = _hermite_mode_matrix(d, cutoff, pts)
    index = {mu: i for i, mu in enumerate(labels)}
    cf = np.zeros((len(labels), len(rngs)), dtype=complex)
    cg = np.zeros_like(cf)
    for t, rng in enumerate(rngs):
        f = random_band_limited("hermite", d, cutoff, rng)
        for mu, c in f.coeffs.items():
            cf[index[mu], t] = c
        for mu, c in hermite_riesz(j, f).coeffs.items():
            cg[index[mu], t] = c
    R = len(r)
    return _Profiles(r, base, d, _angular(_real_matmul(mat, cf), rule, R), _angular(_real_matmul(mat, cg), rule, R))


def _gradient_coeffs(F, labels, index):
    """Coefficient vectors of ``d F / dx_i`` via ``(A_i - A_i^*) / 2``."""
    out = []
    for i in range(F.d):
        c = np.zeros(len(labels), dtype=complex)
        for mu, v in F.coeffs.items():
            if mu[i] > 0:
                nu = mu[:i] + (mu[i] - 1,) + mu[i + 1 :]
                c[index[nu]] += 0.5 * math.sqrt(2 * mu[i]) * v
            nu = mu[:i] + (mu[i] + 1,) + mu[i + 1 :]
            c[index[nu]] -= 0.5 * math.sqrt(2 * mu[i] + 2) * v
        out.append(c)
    return out


def _hermite_radial_profiles(operator, d, cutoff, rngs):
    """Radial-profile inequalities from harmonic projections on the grid."""
    r, base = _base_radial(12.0)
    rule, pts = _sphere_grid(d, False, cutoff + 3, r)
    labels, mat = _hermite_mode_matrix(d, cutoff + 1, pts)
    index = {mu: i for i, mu in enumerate(labels)}
    R, S, T = len(r), len(rule.weights), len(rngs)
    harm = [(m, Y(rule.nodes) * rule.weights) for m in range(cutoff + 2) for Y in real_spherical_basis(d, m)]
    cf = np.zeros((len(labels), T), dtype=complex)
    cF = np.zeros_like(cf)
    gmat = [np.zeros_like(cf) for _ in range(d)]
    omega = rule.nodes
    for t, rng in enumerate(rngs):
        f = random_band_limited("hermite", d, cutoff, rng)
        F = half_inverse(f)
        for mu, c in f.coeffs.items():
            cf[index[mu], t] = c
        for mu, c in F.coeffs.items():
            cF[index[mu], t] = c
        for i, g in enumerate(_gradient_coeffs(F, labels, index)):
            gmat[i][:, t] = g
    fv = _real_matmul(mat, cf).reshape(R, S, T)
    Fv = _real_matmul(mat, cF).reshape(R, S, T)
    drv = sum(_real_matmul(mat, gmat[i]).reshape(R, S, T) * omega[None, :, i, None] for i in range(d))
    ins = np.zeros((T, R))
    outs = np.zeros((T, R))
    for m, yw in harm:
        fm = np.einsum("rst,s->tr", fv, yw)
        Fm = np.einsum("rst,s->tr", Fv, yw)
        ins += np.abs(fm) ** 2
        if operator == "ineq_A":
            outs += np.abs(r * Fm + np.einsum("rst,s->tr", drv, yw)) ** 2
        elif operator == "ineq_B":
            outs += m * (m + d - 2) * np.abs(Fm) ** 2 / r**2
        else:
            outs += m * m * np.abs(Fm) ** 2 / r**2
    return _Profiles(r, base, d, ins, outs)


def _laguerre_vector_profiles(d, M, rngs, kmax=8):
    alpha = 0.5 * d - 1
    r, base = _base_radial(12.0)
    ins, outs = [], []
    for rng in rngs:
        a = np.zeros_like(r)
        b = np.zeros_like(r)
        for m in range(M):
            ft = random_band_limited("laguerre", alpha + m, kmax, rng)
            a += np.abs(r**m * synthesize(ft, r)) ** 2
            b += r ** (2 * m) * np.abs(laguerre_riesz(alpha + m, ft, r)) ** 2
        ins.append(a)
        outs.append(b)
    # the profiles live on R^+ with r^{2 alpha + 1} dr, i.e. D = d
    return _Profiles(r, base, d, np.array(ins), np.array(outs))


def _special_profiles(operator, d, j, cutoff, rngs):
    r, base = _base_radial(16.0)
    rule, pts = _sphere_grid(d, True, cutoff + 3, r)
    labels = _special_labels(d, cutoff)
    index = {lab: i for i, lab in enumerate(labels)}
    R, T = len(r), len(rngs)
    mat = np.stack([special_mode(lab, d, pts) for lab in labels], axis=1)
    cf = np.zeros((len(labels), T), dtype=complex)
    cg = np.zeros_like(cf)
    out_sq = np.zeros((T, R))
    for t, rng in enumerate(rngs):
        f = random_band_limited("special_hermite", d, cutoff, rng)
        if operator != "S_j":
            f, _ = holomorphic_split(f)
        for lab, c in f.coeffs.items():
            cf[index[lab], t] = c
        G = half_inverse(f)
        if operator == "S_j":
            for lab, c in G.coeffs.items():
                cg[index[lab], t] = c
        else:
            out_sq[t] = _five_term_square(operator, G, r)
    ins = _angular(mat @ cf, rule, R)
    if operator == "S_j":
        zmat = np.stack(
            [special_Z(j, BandLimitedFunction("special_hermite", d, {lab: 1.0}, cutoff), pts) for lab in labels], axis=1
        )
        out_sq = _angular(zmat @ cg, rule, R)
    return _Profiles(r, base, 2 * d, ins, out_sq)


def _five_term_square(operator, G, r):
    """Square of ``A_k(r)`` (for ``A5`` the term itself, nonnegative on ``m >= n`` inputs)."""
    d = G.d
    val, der = {}, {}
    for (m, n, jj, k), c in G.coeffs.items():
        ph, dph = _radial_phi_and_derivative(k, d + m + n - 1, r)
        p = m + n
        rp = r**p
        drp = p * r ** (p - 1) if p else np.zeros_like(r)
        key = (m, n, jj)
        val[key] = val.get(key, 0) + c * rp * ph
        der[key] = der.get(key, 0) + c * (drp * ph + rp * dph)
    out = np.zeros_like(r)
    for key, F in val.items():
        m, n, _ = key
        dF = der[key]
        a2 = np.abs(F) ** 2
        if operator == "A1":
            out += np.abs(0.5 * (dF + 0.5 * r * F)) ** 2
        elif operator == "A2":
            out += np.abs(0.5 * (dF - 0.5 * r * F)) ** 2
        elif operator == "A3":
            out += lambda_exact(d, m, n) * a2 / r**2
        elif operator == "A4":
            out += lambda_exact(d, n, m) * a2 / r**2
        else:
            out += 0.5 * (m - n) * a2
    return out
