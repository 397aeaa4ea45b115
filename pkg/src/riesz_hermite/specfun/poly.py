"""Sparse multivariate polynomials with exact (or float/complex) coefficients.

A polynomial is a mapping from exponent tuples to coefficients.  Complex
polynomials on C^d are stored over 2d formal variables
``(z_1..z_d, zbar_1..zbar_d)``, so Wirtinger derivatives are ordinary
partial derivatives in those variables.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

__all__ = [
    "Poly",
    "complex_sphere_monomial_integral",
    "monomials",
    "real_sphere_monomial_integral",
]


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != self.nvars:
                raise ValueError("exponent length does not match nvars")
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def monomial(cls, exponent, coeff=1):
        return cls(len(exponent), {tuple(exponent): coeff})

    @classmethod
    def variable(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms!r})"

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return Poly(self.nvars, {e: s * c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = out.get(tuple(f), 0) + e[i] * c
        return Poly(self.nvars, out)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def map_coeffs(self, fn):
        return Poly(self.nvars, {e: fn(c) for e, c in self.terms.items()})

    # ------------------------------------------------------------------
    # real / complex structure

    def laplacian(self):
        """Euclidean Laplacian, treating all variables as real coordinates."""
        out = Poly(self.nvars)
        for i in range(self.nvars):
            out = out + self.diff(i).diff(i)
        return out

    def complex_laplacian(self):
        """Laplacian on R^{2d} written in (z, zbar): ``4 sum_j d_zj d_zbarj``."""
        d = self.nvars // 2
        out = Poly(self.nvars)
        for j in range(d):
            out = out + self.diff(j).diff(d + j)
        return out.scale(4)

    def conj(self):
        """Complex conjugate of a (z, zbar) polynomial."""
        d = self.nvars // 2
        return Poly(
            self.nvars,
            {e[d:] + e[:d]: (c.conjugate() if hasattr(c, "conjugate") else c) for e, c in self.terms.items()},
        )

    def bidegrees(self):
        d = self.nvars // 2
        return {(sum(e[:d]), sum(e[d:])) for e in self.terms}

    # ------------------------------------------------------------------
    # evaluation

    def __call__(self, points):
        """Evaluate at real points ``(N, nvars)``."""
        pts = np.asarray(points)
        if pts.shape[-1] != self.nvars:
            raise ValueError("point dimension does not match nvars")
        return self._eval_columns([pts[..., i] for i in range(self.nvars)], pts.shape[:-1])

    def eval_complex(self, z):
        """Evaluate a (z, zbar) polynomial at complex points ``(N, d)``."""
        z = np.asarray(z, dtype=complex)
        d = self.nvars // 2
        if z.shape[-1] != d:
            raise ValueError("point dimension does not match complex dimension")
        cols = [z[..., j] for j in range(d)] + [np.conj(z[..., j]) for j in range(d)]
        return self._eval_columns(cols, z.shape[:-1])

    def _eval_columns(self, cols, shape):
        if not self.terms:
            return np.zeros(shape)
        top = max(max(e) for e in self.terms)
        powers = []
        for col in cols:
            tab = [np.ones_like(col)]
            for _ in range(top):
                tab.append(tab[-1] * col)
            powers.append(tab)
        complex_coeffs = any(isinstance(c, complex) for c in self.terms.values())
        out = np.zeros(shape, dtype=complex if complex_coeffs or np.iscomplexobj(cols[0]) else float)
        for e, c in self.terms.items():
            val = np.ones(shape, dtype=out.dtype)
            for i, k in enumerate(e):
                if k:
                    val = val * powers[i][k]
            out = out + (complex(c) if complex_coeffs else float(c)) * val
        return out


def monomials(nvars, degree):
    """Exponent tuples of total degree ``degree``, in descending lexicographic order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(tuple(prefix + [remaining]))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + [e], remaining - e, slots - 1)

    if nvars == 0:
        return [()] if degree == 0 else []
    rec([], degree, nvars)
    return out


def real_sphere_monomial_integral(a):
    """``int_{S^{D-1}} x^a d omega`` (zero unless every exponent is even)."""
    if any(v % 2 for v in a):
        return 0.0
    D = len(a)
    logv = math.log(2.0) + sum(gammaln(0.5 * (v + 1)) for v in a) - gammaln(0.5 * (sum(a) + D))
    return math.exp(logv)


def complex_sphere_monomial_integral(alpha, beta):
    """``int_{S^{2d-1}} z^alpha zbar^beta d sigma`` (zero unless alpha == beta)."""
    if tuple(alpha) != tuple(beta):
        return 0.0
    d = len(alpha)
    logv = math.log(2.0) + d * math.log(math.pi) + sum(math.lgamma(a + 1) for a in alpha) - math.lgamma(sum(alpha) + d)
    return math.exp(logv)


def as_fraction_poly(p):
    return p.map_coeffs(Fraction)
