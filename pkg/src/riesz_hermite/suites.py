"""Named verification suites run by the command line tool.

Each suite returns a list of check dictionaries
``{name, residual, tolerance, pass, detail}``; the CLI attaches anchors
and provenance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from . import mixed_norm as MN
from . import operators as OP
from . import sphere_calculus as SC
from .constants import hecke_bochner_constant
from .quadrature import composite_rule
from .specfun import (
    bigraded_basis,
    laguerre_table,
    multi_indices,
    psi_table,
    real_spherical_basis,
)

SUITES = (
    "kernels",
    "operators",
    "hecke-bochner",
    "prop31",
    "polar-identity",
    "five-term",
    "decay",
    "ap-weights",
    "norm-ratios",
)


@dataclass
class SuiteConfig:
    """Validated suite configuration; ``None`` means the suite default."""

    suite: str
    dim: tuple = ()
    tol: float | None = None
    seed: int = 0
    p: tuple = (1.5, 2.0, 3.0)
    weight_gamma: float | None = None
    max_bidegree: int = 4
    trials: int = 100
    out: str | None = None
    format: str = "json"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES + ("all",):
            raise KeyError(self.suite)
        if any(not isinstance(d, int) or not 1 <= d <= 4 for d in self.dim):
            raise ValueError("dim must be integers in 1..4")
        if self.tol is not None and not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValueError("tol must be positive")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if not self.p or any(not (q > 1 and math.isfinite(q)) for q in self.p):
            raise ValueError("p values must exceed 1")
        if self.weight_gamma is not None and not math.isfinite(self.weight_gamma):
            raise ValueError("weight_gamma must be finite")
        if not isinstance(self.max_bidegree, int) or not 0 <= self.max_bidegree <= 6:
            raise ValueError("max_bidegree must be in 0..6")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    def tolerance(self, default):
        return default if self.tol is None else self.tol

    def dims(self, default):
        return tuple(d for d in (self.dim or default) if d in default) or ()

    def echo(self):
        return {
            "suite": self.suite,
            "dim": list(self.dim),
            "tol": self.tol,
            "seed": self.seed,
            "p": list(self.p),
            "weight_gamma": self.weight_gamma,
            "max_bidegree": self.max_bidegree,
            "trials": self.trials,
            "format": self.format,
        }


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else repr(f)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def check(name, residual, tolerance, **detail):
    residual = float(residual)
    return {
        "name": name,
        "residual": residual,
        "tolerance": float(tolerance),
        "pass": bool(math.isfinite(residual) and residual <= tolerance),
        "detail": _jsonable(detail),
    }


def _from_identity(prefix, c, tol=None):
    return check(f"{prefix}.{c.name}", c.residual, c.tolerance if tol is None else tol, **c.detail)


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


# ----------------------------------------------------------------------
# kernels

GRID = np.linspace(0.2, 2.2, 5)
TIMES = (0.2, 0.5, 1.0)


def suite_kernels(cfg):
    tol = cfg.tolerance(1e-9)
    out = []
    for d in cfg.dims((1, 2)):
        e = np.zeros(d)
        e[0] = 1.0
        f = np.zeros(d)
        f[-1] = 1.0
        x = GRID[:, None, None] * e
        y = -0.7 * GRID[None, :, None] * f + 0.3 * GRID[None, :, None] * e
        worst = max(_rel(K.mehler(t, x, y, d), K.mehler(t, x, y, d, route="eigen_series")) for t in TIMES)
        out.append(check(f"kernels.mehler.d{d}", worst, tol, grid="5x5x3", norm="relative to grid sup"))
    r, s = np.meshgrid(GRID, GRID + 0.05, indexing="ij")
    for alpha in (0.0, 0.5, 1.5):
        worst = max(_rel(K.laguerre_heat(t, r, s, alpha), K.laguerre_heat(t, r, s, alpha, route="eigen_series")) for t in TIMES)
        out.append(check(f"kernels.laguerre.alpha{alpha}", worst, tol))
    if 1 in cfg.dims((1, 2)):
        z = (GRID[:, None] * np.exp(1j * np.linspace(0, 2.5, 5))[None, :])[..., None]
        worst = max(_rel(K.special_heat(t, z, 1), K.special_heat(t, z, 1, route="eigen_series")) for t in TIMES)
        out.append(check("kernels.special_heat.d1", worst, tol))
    for delta in (0, 1, 2):
        worst = max(_rel(K.k_small(t, r, s, delta), K.k_small(t, r, s, delta, route="eigen_series")) for t in TIMES)
        out.append(check(f"kernels.k_small.delta{delta}", worst, tol))
    out.extend(_semigroup_checks(cfg.tolerance(1e-8)))
    return out


def _semigroup_checks(tol, t=0.3, s=0.45):
    out = []
    rule = composite_rule(np.linspace(-12.0, 12.0, 25), 20)
    xs = np.array([-1.3, -0.2, 0.6, 1.7])
    lhs = np.array([[np.sum(rule.weights * K.mehler(t, a, rule.nodes, 1) * K.mehler(s, rule.nodes, b, 1)) for b in xs] for a in xs])
    rhs = K.mehler(t + s, xs[:, None, None], xs[None, :, None], 1)
    out.append(check("kernels.semigroup.mehler.d1", _rel(lhs, rhs), tol))
    rr = composite_rule(np.linspace(0.0, 12.0, 25), 20)
    pts = np.array([0.3, 0.9, 1.6, 2.4])
    for alpha in (0.0, 0.5, 1.5):
        mid = rr.weights * rr.nodes ** (2 * alpha + 1)
        lhs = np.array(
            [[np.sum(mid * K.laguerre_heat(t, a, rr.nodes, alpha) * K.laguerre_heat(s, rr.nodes, b, alpha)) for b in pts] for a in pts]
        )
        rhs = K.laguerre_heat(t + s, pts[:, None], pts[None, :], alpha)
        out.append(check(f"kernels.semigroup.laguerre.alpha{alpha}", _rel(lhs, rhs), tol))
    z = np.array([[0.4 + 0.1j], [1.2 - 0.6j], [-0.3 + 1.5j]])
    lhs = OP.twisted_convolve(lambda w: K.special_heat(t, w, 1), lambda w: K.special_heat(s, w, 1), z, 1)
    rhs = K.special_heat(t + s, z, 1)
    out.append(check("kernels.semigroup.special.d1", _rel(lhs, rhs), tol))
    return out


# ----------------------------------------------------------------------
# operators


def _fd_laplacian(f, x, h):
    c = (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)
    x = np.asarray(x, dtype=float)
    lap = np.zeros(len(x))
    for i in range(x.shape[1]):
        for k, o in enumerate((-2, -1, 0, 1, 2)):
            e = np.zeros(x.shape[1])
            e[i] = o * h
            lap += c[k] * f(x + e) / (h * h)
    return lap


def _eigen_checks(tol, rng):
    out = []
    for d in (1, 2, 3):
        x = rng.uniform(-1.5, 1.5, (6, d))
        worst = 0.0
        for mu in multi_indices(d, 4):
            g = OP.BandLimitedFunction("hermite", d, {mu: 1.0}, 4)
            f = lambda p, g=g: OP.synthesize(g, p).real
            h_f = -_fd_laplacian(f, x, 1e-2) + np.sum(x * x, axis=1) * f(x)
            lam = OP.eigenvalue("hermite", d, mu)
            worst = max(worst, _rel(h_f, lam * f(x)))
        out.append(check(f"operators.eigen.hermite.d{d}", worst, tol, max_degree=4))
    r = np.linspace(0.3, 2.4, 8)
    h = 1e-3
    for alpha in (0.0, 0.5, 1.5):
        worst = 0.0
        for k in range(5):
            v = [psi_table(k, alpha, r + o * h)[k] for o in (-2, -1, 0, 1, 2)]
            d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
            d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
            lf = -d2 - (2 * alpha + 1) / r * d1 + r * r * v[2]
            worst = max(worst, _rel(lf, (4 * k + 2 * alpha + 2) * v[2]))
        out.append(check(f"operators.eigen.laguerre.alpha{alpha}", worst, tol))
    z = np.array([0.7 + 0.4j, -0.5 + 1.1j, 1.3 - 0.2j])
    worst = 0.0
    labels = [(0, 0, 1, k) for k in range(5)] + [(2, 0, 1, 1), (0, 2, 1, 1), (1, 0, 1, 0), (3, 0, 1, 0)]
    for lab in labels:
        f = lambda w, lab=lab: OP.special_mode(lab, 1, w[:, None])
        vals = _twisted_laplacian_fd(f, z)
        worst = max(worst, _rel(vals, OP.eigenvalue("special_hermite", 1, lab) * f(z)))
    out.append(check("operators.eigen.special.d1", worst, tol, labels=labels))
    return out


def _twisted_laplacian_fd(f, z, h=1e-3):
    """``-Delta + |z|^2/4 - iN`` with ``N`` the derivative along ``z -> e^{i theta} z``."""
    c2 = (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)
    c1 = (1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12)
    lap = 0
    rot = 0
    for k, o in enumerate((-2, -1, 0, 1, 2)):
        lap = lap + c2[k] * (f(z + o * h) + f(z + 1j * o * h)) / (h * h)
        rot = rot + c1[k] * f(np.exp(1j * o * h) * z) / h
    return -lap + 0.25 * np.abs(z) ** 2 * f(z) - 1j * rot


def _random_rotation(d, rng, complex_=False):
    a = rng.standard_normal((d, d)) + (1j * rng.standard_normal((d, d)) if complex_ else 0)
    q, r = np.linalg.qr(a)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    if not complex_ and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def suite_operators(cfg):
    rng = np.random.default_rng(cfg.seed)
    out = _eigen_checks(cfg.tolerance(1e-6), rng)
    # heat and half-inverse routes
    f1 = OP.random_band_limited("hermite", 1, 4, rng)
    x1 = np.array([[-1.1], [0.2], [0.9]])
    out.append(
        check(
            "operators.heat_routes.hermite.d1",
            _rel(OP.heat_apply(f1, 0.4, points=x1, route="kernel_integral"), OP.synthesize(OP.heat_apply(f1, 0.4), x1)),
            1e-8,
        )
    )
    g = OP.random_band_limited("laguerre", 0.5, 4, rng)
    rp = np.array([0.3, 1.0, 1.8])
    out.append(
        check(
            "operators.heat_routes.laguerre.alpha0.5",
            _rel(OP.heat_apply(g, 0.4, points=rp, route="kernel_integral"), OP.synthesize(OP.heat_apply(g, 0.4), rp)),
            1e-8,
        )
    )
    fs = OP.random_band_limited("special_hermite", 1, 3, rng, modes=4)
    zp = np.array([[0.3 + 0.4j], [1.1 - 0.2j]])
    out.append(
        check(
            "operators.heat_routes.special.d1",
            _rel(OP.heat_apply(fs, 0.4, points=zp, route="twisted_convolution"), OP.synthesize(OP.heat_apply(fs, 0.4), zp)),
            1e-8,
        )
    )
    for basis, par in (("hermite", 2), ("laguerre", 0.5), ("special_hermite", 1)):
        f = OP.random_band_limited(basis, par, 3, rng)
        a, b = OP.half_inverse(f), OP.half_inverse(f, route="subordination", tol=1e-13)
        res = max(abs(a.coeffs[k] - b.coeffs[k]) for k in a.coeffs) / a.norm()
        out.append(check(f"operators.half_inverse.{basis}", res, 1e-10))
    # Riesz routes, contraction
    tol3 = cfg.tolerance(1e-5)
    for d in (1, 2):
        f = OP.random_band_limited("hermite", d, 3, rng)
        pts = rng.uniform(-1.5, 1.5, (6, d))
        worst = 0.0
        for j in range(1, d + 1):
            a = OP.hermite_riesz(j, f, pts)
            b = OP.hermite_riesz(j, f, pts, route="kernel_integral")
            worst = max(worst, float(np.max(np.abs(a - b))))
        out.append(check(f"operators.riesz_routes.d{d}", worst, tol3, norm="sup error"))
    excess = 0.0
    for d in (1, 2, 3):
        for _ in range(100):
            f = OP.random_band_limited("hermite", d, 4, rng)
            for j in range(1, d + 1):
                excess = max(excess, OP.hermite_riesz(j, f).norm() / f.norm() - 1.0)
    out.append(check("operators.riesz_contraction", max(excess, 0.0), 1e-12, inputs=300, max_ratio_minus_one=excess))
    fs = OP.random_band_limited("special_hermite", 1, 3, rng, modes=5)
    zp = np.array([[0.4 + 0.3j], [-0.9 + 0.5j], [1.3 - 0.8j]])
    worst = 0.0
    for conj in (False, True):
        a = OP.special_riesz(1, fs, zp, conjugate=conj)
        b = OP.special_riesz(1, fs, zp, route="twisted_convolution", conjugate=conj)
        worst = max(worst, float(np.max(np.abs(a - b))))
    out.append(check("operators.special_riesz_routes.d1", worst, tol3))
    out.extend(_twisted_checks())
    out.extend(_rotation_checks(rng, tol3))
    return out


def _phi(k):
    return lambda z: laguerre_table(k, 0, 0.5 * np.abs(z[..., 0]) ** 2)[k] * np.exp(-0.25 * np.abs(z[..., 0]) ** 2)


def _twisted_checks():
    z = np.array([[0.3 + 0.2j], [1.1 - 0.5j], [-0.7 + 0.9j], [0j], [2.0 + 1.0j]])
    worst = 0.0
    for k in range(4):
        for m in range(4):
            v = OP.twisted_convolve(_phi(k), _phi(m), z, 1) / (2 * math.pi)
            ref = _phi(k)(z) if k == m else 0.0
            worst = max(worst, float(np.max(np.abs(v - ref))))
    zero = OP.twisted_convolve(_phi(0), _phi(0), np.array([[0j]]), 1)[0]
    return [
        check("operators.twisted.projections.d1", worst, 1e-7, max_index=3),
        check("operators.twisted.phi0_at_origin", abs(zero - 2 * math.pi), 1e-9, value=complex(zero)),
    ]


def _rotation_checks(rng, tol):
    out = []
    for d in (2, 3):
        f = OP.random_band_limited("hermite", d, 3, rng, modes=6)
        k = _random_rotation(d, rng)
        u = rng.standard_normal(d)
        c = SC.rotation_covariance_hermite(f, k, u, rng.standard_normal((5, d)), tol=tol)
        out.append(check(f"operators.rotation.hermite.spectral.d{d}", c.residual, tol))
    f = OP.random_band_limited("hermite", 2, 3, rng, modes=5)
    c = SC.rotation_covariance_hermite(f, _random_rotation(2, rng), rng.standard_normal(2), rng.standard_normal((3, 2)), route="kernel_integral", tol=tol)
    out.append(check("operators.rotation.hermite.kernel.d2", c.residual, tol))
    for d in (1, 2):
        f = OP.random_band_limited("special_hermite", d, 3, rng, modes=6)
        k = _random_rotation(d, rng, complex_=True)
        w = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        z = rng.standard_normal((4, d)) + 1j * rng.standard_normal((4, d))
        for form in ("corrected", "printed"):
            c = SC.rotation_covariance_special(f, k, w, z, form=form, tol=tol)
            out.append(check(f"operators.rotation.special.{form}.d{d}", c.residual, tol, form=form))
    return out


# ----------------------------------------------------------------------
# Hecke-Bochner, Funk-Hecke, Parseval


def suite_hecke_bochner(cfg):
    tol = cfg.tolerance(1e-8)
    radii = np.linspace(0.2, 3.0, 8)
    out = []
    for d in cfg.dims((2, 3, 4)) if cfg.dim else (3,):
        for m in (0, 1, 2):
            Y = real_spherical_basis(d, m)[0]
            first = SC.hecke_bochner_hermite(lambda r, m=m: r**m * np.exp(-r * r / 2) * (1 + 0.3 * r * r), Y, TIMES, radii, tol=tol)
            out.append(check(f"hecke-bochner.ratio.d{d}.m{m}", first["spread"], tol, constant=first["constant"]))
            Y2 = real_spherical_basis(d, m)[-1]
            second = SC.hecke_bochner_hermite(lambda r, m=m: r**m * np.exp(-0.6 * r * r) * (2 - 0.1 * r**4), Y2, TIMES, radii, tol=tol)
            pinned = hecke_bochner_constant(d)
            res = max(abs(first["constant"] - pinned), abs(second["constant"] - pinned))
            out.append(check(f"hecke-bochner.calibration.d{d}.m{m}", res, tol, pinned=pinned, constants=[first["constant"], second["constant"]]))
    rng = np.random.default_rng(cfg.seed)
    x = rng.standard_normal((12, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    for m, phi in ((1, lambda u: u), (2, np.exp), (3, lambda u: np.cos(2 * u))):
        c = SC.funk_hecke_check(phi, m, 3, x)
        out.append(check(f"hecke-bochner.funk_hecke.d3.m{m}", c.residual, c.tolerance))
    for basis, par in (("hermite", 3), ("special_hermite", 1)):
        f = OP.random_band_limited(basis, par, 3, rng, modes=4)
        c = SC.parseval_check(f)
        out.append(check(f"hecke-bochner.parseval.{basis}", c.residual, c.tolerance))
    return out


# ----------------------------------------------------------------------
# bigraded identities


def suite_prop31(cfg):
    tol = cfg.tolerance(1e-8)
    out = []
    for d in cfg.dims((1, 2)):
        basis = [
            Y
            for M in range(cfg.max_bidegree + 1)
            for m in range(M + 1)
            for Y in bigraded_basis(d, m, M - m)
        ]
        worst, failing, pairs = {}, {}, 0
        rng = np.random.default_rng(cfg.seed)
        for P in basis:
            for Q in basis:
                pairs += 1
                for c in SC.prop31_suite(P, Q, tol=tol, rng=rng):
                    worst[c.name] = max(worst.get(c.name, 0.0), c.residual)
                    if c.residual > tol:
                        failing.setdefault(c.name, []).append([P.m, P.n, P.j, Q.m, Q.n, Q.j])
        for name in sorted(worst):
            bad = failing.get(name, [])
            out.append(check(f"prop31.d{d}.{name}", worst[name], tol, pairs=pairs, failing_pairs=len(bad), examples=bad[:5]))
    return out


# ----------------------------------------------------------------------
# polar identity


def suite_polar_identity(cfg):
    tol = cfg.tolerance(1e-7)
    radii = np.linspace(0.3, 2.5, 6)
    Y1 = real_spherical_basis(3, 1)[0]
    Y2 = real_spherical_basis(3, 2)[2]

    def g(r):
        return np.exp(-r * r / 2)

    one = OP.expand(lambda x: g(np.linalg.norm(x, axis=-1)) * Y1.poly(x), "hermite", 3, 5)
    two = OP.expand(
        lambda x: g(np.linalg.norm(x, axis=-1)) * (Y1.poly(x) + (1 + np.sum(x * x, -1)) * Y2.poly(x)), "hermite", 3, 6
    )
    out = []
    for label, f in (("one_mode", one), ("two_mode", two)):
        c = SC.riesz_polar_identity(f, radii, tol=tol)["check"]
        out.append(check(f"polar-identity.polar.{label}.d3", c.residual, tol))
    rng = np.random.default_rng(cfg.seed)
    f = OP.random_band_limited("hermite", 3, 4, rng, modes=6)
    c = SC.riesz_polar_identity(f, radii, tol=tol)["check"]
    out.append(check("polar-identity.polar.random.d3", c.residual, tol))
    for m in (0, 1, 2):
        ft = OP.BandLimitedFunction("laguerre", 0.5 + m, {1: 1.0, 0: 0.4, 2: -0.3j}, 2)
        res = SC.laguerre_link(ft, m, 3, radii)
        out.append(check(f"polar-identity.laguerre_link.m{m}", res["check"].residual, res["check"].tolerance))
        out.append(check(f"polar-identity.laguerre_link.substitution.m{m}", res["substitution"].residual, res["substitution"].tolerance))
    return out


# ----------------------------------------------------------------------
# five-term decomposition


def suite_five_term(cfg):
    tol = cfg.tolerance(1e-7)
    rng = np.random.default_rng(cfg.seed)
    radii = np.linspace(0.3, 2.5, 7)
    out = []
    worst, a5_min, scale = 0.0, math.inf, 0.0
    for _ in range(4):
        f = OP.random_band_limited("special_hermite", 1, 3, rng)
        rep = SC.five_term(f, radii)
        worst = max(worst, float(np.max(np.abs(rep.residual)) / np.max(np.abs(rep.lhs))))
        fh, _ = SC.holomorphic_split(f)
        a5 = SC.five_term(fh, radii).A5
        a5_min = min(a5_min, float(np.min(a5)))
        scale = max(scale, float(np.max(np.abs(a5))))
    out.append(check("five-term.identity.d1", worst, tol, inputs=4, cutoff=3, lambda_form="exact"))
    f = OP.random_band_limited("special_hermite", 1, 3, rng)
    rep = SC.five_term(f, radii, lambda_form="printed")
    out.append(
        check(
            "five-term.identity.printed_lambda.d1",
            float(np.max(np.abs(rep.residual)) / np.max(np.abs(rep.lhs))),
            tol,
            lambda_form="printed",
        )
    )
    f2 = OP.random_band_limited("special_hermite", 2, 3, rng, modes=8)
    rep = SC.five_term(f2, radii[:4])
    out.append(check("five-term.identity.d2", float(np.max(np.abs(rep.residual)) / np.max(np.abs(rep.lhs))), tol))
    out.append(check("five-term.a5_nonnegative.d1", max(0.0, -a5_min) / max(scale, 1e-300), 1e-12, min_A5=a5_min))
    f = OP.random_band_limited("special_hermite", 1, 3, rng, modes=5)
    c = SC.special_F_coeffs(f, np.linspace(0.3, 2.0, 4))["check"]
    out.append(check("five-term.coefficients.d1", c.residual, c.tolerance))
    c = SC.semigroup_projection_check(f, 0.4, np.linspace(0.3, 2.0, 3))
    out.append(check("five-term.semigroup_projection.d1", c.residual, c.tolerance))
    for variant in ("corrected", "printed"):
        c = SC.circle_identity_check(1, 1, 0, 1, 0.5, 1.2, 0.8, variant=variant)
        out.append(check(f"five-term.circle.{variant}.d1", c.residual, c.tolerance, **c.detail))
    return out


# ----------------------------------------------------------------------
# kernel decay


def _stability(a, b):
    return max(a, b) / min(a, b) - 1.0


def suite_decay(cfg):
    out = []
    d = (cfg.dim or (3,))[0]
    d = d if 2 <= d <= 4 else 3
    for tag, n in (("riesz_pointwise", 1000), ("riesz_gradient", 250), ("riesz_operator", 100)):
        a = MN.kernel_decay_report(tag, d=d, samples=n, seed=cfg.seed).max
        b = MN.kernel_decay_report(tag, d=d, samples=4 * n, seed=cfg.seed + 1).max
        name = "decay.riesz_operator" if tag == "riesz_operator" else f"decay.riesz.{tag}"
        out.append(check(f"{name}.d{d}", _stability(a, b) if math.isfinite(a * b) else math.inf, 1.0, sup=a, sup_refined=b, samples=[n, 4 * n]))
    sups = {}
    for m in range(7):
        for tag in ("km", "km_derivative"):
            a = MN.kernel_decay_report(tag, d=d, m=m, samples=40, seed=cfg.seed).max
            b = MN.kernel_decay_report(tag, d=d, m=m, samples=160, seed=cfg.seed + 1).max
            sups[(tag, m)] = b
            out.append(check(f"decay.km.{tag}.m{m}.d{d}", _stability(a, b), 1.0, sup=a, sup_refined=b))
    for tag in ("km", "km_derivative"):
        vals = [sups[(tag, m)] for m in range(7)]
        out.append(check(f"decay.km.{tag}.uniform.d{d}", max(vals) / min(vals) - 1.0, 1.0, sups=vals))
        # the bound must not grow with m; m = 0 alone lacks the s^m vanishing at s = 0
        out.append(check(f"decay.km.{tag}.no_growth.d{d}", max(max(vals[2:]) / max(vals[:2]) - 1.0, 0.0), 1.0, sups=vals))
    a = MN.lemma24_report(1000, seed=cfg.seed)
    b = MN.lemma24_report(1000, seed=cfg.seed + 1)
    out.append(check("decay.lemma24.stability", _stability(a.max, b.max), 1.0, sup=a.max, sup_other_seed=b.max))
    limit = max(abs(MN.lemma24_integral(1.0, B, c, 0.5) * (1 - B) ** 0.5 - 1 / (c + 0.5)) * (c + 0.5) for c in (0.5, 1.0, 2.5) for B in (1e-9,))
    out.append(check("decay.lemma24.small_B_limit", limit, 1e-7))
    h1 = MN.hormander_report(3, pairs=[(1.0, 1.1)]).ratios[0]
    h2 = MN.hormander_report(3, pairs=[(1.0, 1.1)], edge=2 * (1.1 + 8.0)).ratios[0]
    out.append(check("decay.hormander.truncation", abs(h1 - h2) / h1, 0.1, value=h1, doubled=h2))
    ht1 = MN.hormander_report(3, pairs=[(1.0, 1.1)], transposed=True).ratios[0]
    ht2 = MN.hormander_report(3, pairs=[(1.0, 1.1)], transposed=True, edge=2 * (1.1 + 8.0)).ratios[0]
    out.append(check("decay.hormander.transposed_truncation", abs(ht1 - ht2) / ht1, 0.1, value=ht1, doubled=ht2))
    for transposed in (False, True):
        a = MN.hormander_report(3, samples=3, seed=cfg.seed, transposed=transposed).max
        b = MN.hormander_report(3, samples=6, seed=cfg.seed + 1, transposed=transposed).max
        label = "transposed" if transposed else "direct"
        out.append(check(f"decay.hormander.{label}.sample_stability", _stability(a, b), 1.0, sup=a, sup_refined=b))
    return out


# ----------------------------------------------------------------------
# A_p machinery


def suite_ap_weights(cfg):
    out = []
    d = (cfg.dim or (3,))[0]
    alpha = 0.5 * d - 1
    for p in cfg.p:
        one = MN.ap_constant(MN.WeightSpec.unit(alpha, p)).constant
        out.append(check(f"ap-weights.unit.p{p}", abs(one - 1.0), 1e-12))
        lo, hi = MN.WeightSpec.unit(alpha, p).admissible_range()
        inside = np.linspace(lo, hi, 11)[1:-1]
        consts = MN.ap_profile(inside, alpha, p)
        out.append(check(f"ap-weights.inside_finite.p{p}", 0.0 if all(map(math.isfinite, consts)) else math.inf, 0.0, gammas=inside, constants=consts))
        for g in (lo - 0.1, hi + 0.1):
            w = MN.WeightSpec.power(g, alpha, p)
            seq = [MN.ap_constant(w, MN.refined_family(L)).constant for L in range(2, 14, 2)]
            growth = all(b > a for a, b in zip(seq, seq[1:])) and seq[-1] > 2 * seq[0]
            inf_default = not MN.ap_constant(w).finite
            out.append(check(f"ap-weights.outside_growth.p{p}.gamma{g:+.3f}", 0.0 if growth and inf_default else 1.0, 0.0, sequence=seq))
        # duality: [w]_{A_p} = [w^{1-p'}]_{A_p'}^{p-1}
        g = 0.3 * hi
        c1 = MN.ap_constant(MN.WeightSpec.power(g, alpha, p)).constant
        q = p / (p - 1)
        c2 = MN.ap_constant(MN.WeightSpec.power(-g / (p - 1), alpha, q)).constant
        out.append(check(f"ap-weights.duality.p{p}", abs(c1 - c2 ** (p - 1)) / c1, 1e-10))
    grid = tuple(np.geomspace(1e-3, 1e3, 61))
    tab = MN.WeightSpec("tabulated", grid=grid, values=tuple(np.asarray(grid) ** 0.7), alpha=alpha, p=2.0)
    fam = [q for q in MN.default_family() if q[0] >= 1e-3 and q[1] <= 1e3]
    res = abs(MN.ap_constant(tab, fam).constant - MN.ap_constant(MN.WeightSpec.power(0.7, alpha, 2.0), fam).constant)
    out.append(check("ap-weights.tabulated_matches_power", res, 1e-8))
    for dd in (2, 3, 4):
        out.append(check(f"ap-weights.bridging.power.d{dd}", MN.radial_bridging_probe(MN.WeightSpec.power(0.7), dd), 1e-10))
        out.append(check(f"ap-weights.bridging.tabulated.d{dd}", MN.radial_bridging_probe(tab, dd), 1e-10))
    c1, c2 = MN.ball_comparability(d)
    out.append(check(f"ap-weights.ball_comparability.d{d}", 0.0 if 0 < c1 <= c2 < math.inf else math.inf, 0.0, c1=c1, c2=c2))
    return out


# ----------------------------------------------------------------------
# norm ratios

RATIO_OPERATORS = ("R_j", "S_j", "laguerre_vector", "A1", "A2", "A3", "A4", "A5", "ineq_A", "ineq_B", "ineq_C")


def _gamma_for(op, p, cfg):
    special = op in MN.SPECIAL_OPERATORS
    d = 1 if special else 3
    alpha = d - 1 if special else 0.5 * d - 1
    if cfg.weight_gamma is not None:
        return cfg.weight_gamma
    return 0.25 * (2 * alpha + 2) * (p - 1)


def suite_norm_ratios(cfg):
    out = []
    seeds = (cfg.seed, cfg.seed + 1)
    for op in RATIO_OPERATORS:
        base = max(MN.norm_ratio_experiment(op, 2.0, None, cfg.trials, seeds[0]).max, 1e-300)
        for p in cfg.p:
            w = MN.WeightSpec.power(_gamma_for(op, p, cfg))
            try:
                maxes = [MN.norm_ratio_experiment(op, p, w, cfg.trials, s).max for s in seeds]
            except ValueError as exc:
                out.append(check(f"norm-ratios.{op}.p{p}.admissible", math.inf, 0.0, error=str(exc)))
                continue
            out.append(check(f"norm-ratios.{op}.p{p}.bounded", maxes[0] / base, 10.0, baseline=base, max_ratio=maxes[0], gamma=w.gamma))
            out.append(check(f"norm-ratios.{op}.p{p}.seed_stability", abs(maxes[0] - maxes[1]) / maxes[0], 0.1, maxes=maxes))
    rj = MN.norm_ratio_experiment("R_j", 2.0, None, cfg.trials, cfg.seed).max
    out.append(check("norm-ratios.R_j.unweighted_contraction", max(rj - 1.0, 0.0), 1e-6, max_ratio=rj))
    ctrl = MN.negative_control("R_j", 2.0)
    out.append(
        check(
            "norm-ratios.R_j.negative_control",
            0.0,
            0.0,
            note="inadmissible weight, recorded only",
            edges=[e for e, _ in ctrl],
            max_ratios=[v for _, v in ctrl],
        )
    )
    return out


RUNNERS = {
    "kernels": suite_kernels,
    "operators": suite_operators,
    "hecke-bochner": suite_hecke_bochner,
    "prop31": suite_prop31,
    "polar-identity": suite_polar_identity,
    "five-term": suite_five_term,
    "decay": suite_decay,
    "ap-weights": suite_ap_weights,
    "norm-ratios": suite_norm_ratios,
}


def run(cfg):
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    checks = []
    for name in names:
        checks.extend(RUNNERS[name](cfg))
    return checks
