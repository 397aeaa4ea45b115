"""Orthonormal real spherical harmonics on S^{d-1} and bigraded harmonics on S^{2d-1}.

Both bases are produced the same way: harmonic projection of a spanning
set of monomials with exact rational arithmetic, then Gram-Schmidt
(Cholesky of the exact-formula Gram matrix) in the sphere inner product.
The spanning set uses the monomials not divisible by ``x_1^2`` (resp.
``z_1 zbar_1``), which is a complement of ``|x|^2 P_{m-2}`` and therefore
maps bijectively onto the harmonic space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np

from .poly import (
    Poly,
    complex_sphere_monomial_integral,
    monomials,
    real_sphere_monomial_integral,
)

__all__ = [
    "BigradedHarmonic",
    "HarmonicBasisElement",
    "basis_from_json",
    "basis_to_json",
    "bigraded_basis",
    "harmonic_projection",
    "real_spherical_basis",
    "sphere_inner",
]

MAX_REAL_DEGREE = 8
MAX_BIDEGREE = 6


def harmonic_projection(p, complex_kind=False):
    """Harmonic part of a homogeneous polynomial (Fischer decomposition).

    ``H(p) = sum_k (-1)^k |x|^{2k} Delta^k p / prod_{i=1}^k 2i (2N + D - 2 - 2i)``
    with N the total degree and D the real dimension.  Exact when the
    coefficients are integers or Fractions.
    """
    nv = p.nvars
    if complex_kind:
        d = nv // 2
        lap = Poly.complex_laplacian
        rsq = Poly(nv, {tuple(1 if i in (j, d + j) else 0 for i in range(nv)): 1 for j in range(d)})
        D = 2 * d
    else:
        lap = Poly.laplacian
        rsq = Poly(nv, {tuple(2 if i == j else 0 for i in range(nv)): 1 for j in range(nv)})
        D = nv
    N = p.degree()
    out = p
    term = p
    rpow = Poly.monomial((0,) * nv)
    denom = Fraction(1)
    k = 0
    while True:
        term = lap(term)
        if not term:
            break
        k += 1
        denom *= 2 * k * (2 * N + D - 2 - 2 * k)
        rpow = rpow * rsq
        out = out + (rpow * term).scale(Fraction((-1) ** k) / denom)
    return out


def sphere_inner(p, q, complex_kind=False):
    """``int_{sphere} p conj(q)`` from the exact monomial integrals."""
    total = 0.0
    if complex_kind:
        d = p.nvars // 2
        for e1, c1 in p.terms.items():
            for e2, c2 in q.terms.items():
                # p * conj(q): conj swaps the z and zbar halves of q's exponents
                a = tuple(x + y for x, y in zip(e1[:d], e2[d:]))
                b = tuple(x + y for x, y in zip(e1[d:], e2[:d]))
                if a == b:
                    total += complex(c1) * complex(c2).conjugate() * complex_sphere_monomial_integral(a, b)
        return total
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            total += float(c1) * float(c2) * real_sphere_monomial_integral(e)
    return total


def _orthonormalize(polys, complex_kind):
    n = len(polys)
    gram = np.empty((n, n), dtype=complex if complex_kind else float)
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = sphere_inner(polys[i], polys[j], complex_kind)
            gram[j, i] = np.conj(gram[i, j])
    chol = np.linalg.cholesky(gram)
    inv = np.linalg.solve(chol, np.eye(n))
    keys = sorted({e for p in polys for e in p.terms}, reverse=True)
    mat = np.array([[complex(p.terms.get(e, 0)) if complex_kind else float(p.terms.get(e, 0)) for e in keys] for p in polys])
    coeffs = inv @ mat
    return keys, coeffs


@dataclass(frozen=True)
class HarmonicBasisElement:
    """Real harmonic homogeneous polynomial, unit norm on S^{d-1}.

    ``coeffs`` maps exponent tuples to real coefficients; ``j`` is 1-based.
    """

    d: int
    m: int
    j: int
    coeffs: tuple  # ((exponent, value), ...)

    @property
    def poly(self):
        return Poly(self.d, dict(self.coeffs))

    def __call__(self, x):
        return self.poly(x)

    def gradient(self, x):
        """Euclidean gradient at points ``(N, d)``, shape ``(N, d)``."""
        p = self.poly
        return np.stack([p.diff(i)(x) for i in range(self.d)], axis=-1)

    def tangential_gradient(self, omega):
        """``grad_0 Y = grad Y - omega (omega . grad Y)`` at unit vectors."""
        g = self.gradient(omega)
        radial = np.sum(omega * g, axis=-1, keepdims=True)
        return g - omega * radial

    def coeff_dict(self):
        return dict(self.coeffs)


@dataclass(frozen=True)
class BigradedHarmonic:
    """Complex harmonic polynomial ``sum c_{ab} z^a zbar^b`` of bidegree (m, n)."""

    d: int
    m: int
    n: int
    j: int
    coeffs: tuple  # (((alpha, beta), value), ...)

    @property
    def poly(self):
        return Poly(2 * self.d, {a + b: c for (a, b), c in self.coeffs})

    def __call__(self, z):
        return self.poly.eval_complex(z)

    def coeff_dict(self):
        return dict(self.coeffs)


def _check_real_range(d, m):
    if not 2 <= d <= 4 or not 0 <= m <= MAX_REAL_DEGREE:
        raise ValueError(f"unsupported-range: real_spherical_basis needs 2 <= d <= 4, 0 <= m <= {MAX_REAL_DEGREE}")


@cache
def _real_basis(d, m):
    gens = [e for e in monomials(d, m) if e[0] <= 1]
    polys = [harmonic_projection(Poly.monomial(e)) for e in gens]
    keys, coeffs = _orthonormalize(polys, complex_kind=False)
    out = []
    for j, row in enumerate(coeffs, start=1):
        table = tuple((k, float(v)) for k, v in zip(keys, row) if abs(v) > 1e-15)
        out.append(HarmonicBasisElement(d, m, j, table))
    return tuple(out)


def real_spherical_basis(d, m):
    """Orthonormal basis of degree-m spherical harmonics on S^{d-1}."""
    _check_real_range(d, m)
    return list(_real_basis(d, m))


@cache
def _bigraded(d, m, n):
    gens = []
    for a in monomials(d, m):
        for b in monomials(d, n):
            if min(a[0], b[0]) == 0:
                gens.append(a + b)
    gens.sort(reverse=True)
    if not gens:
        return ()
    polys = [harmonic_projection(Poly.monomial(e), complex_kind=True) for e in gens]
    keys, coeffs = _orthonormalize(polys, complex_kind=True)
    out = []
    for j, row in enumerate(coeffs, start=1):
        table = tuple(((k[:d], k[d:]), complex(v)) for k, v in zip(keys, row) if abs(v) > 1e-15)
        out.append(BigradedHarmonic(d, m, n, j, table))
    return tuple(out)


def bigraded_basis(d, m, n):
    """Orthonormal basis of H_{m,n} on S^{2d-1}; empty when the space is trivial."""
    if d not in (1, 2) or m < 0 or n < 0 or m + n > MAX_BIDEGREE:
        raise ValueError(f"unsupported-range: bigraded_basis needs d in {{1, 2}}, m + n <= {MAX_BIDEGREE}")
    return list(_bigraded(d, m, n))


def basis_to_json(basis):
    """Coefficient tables as JSON text (exponent tuple -> coefficient)."""
    items = []
    for el in basis:
        if isinstance(el, BigradedHarmonic):
            items.append(
                {
                    "kind": "bigraded",
                    "d": el.d,
                    "m": el.m,
                    "n": el.n,
                    "j": el.j,
                    "coeffs": [[list(a), list(b), c.real, c.imag] for (a, b), c in el.coeffs],
                }
            )
        else:
            items.append(
                {
                    "kind": "real",
                    "d": el.d,
                    "m": el.m,
                    "j": el.j,
                    "coeffs": [[list(e), c] for e, c in el.coeffs],
                }
            )
    return json.dumps({"schema": 1, "basis": items}, sort_keys=True)


def basis_from_json(text):
    data = json.loads(text)
    out = []
    for it in data["basis"]:
        if it["kind"] == "bigraded":
            table = tuple(((tuple(a), tuple(b)), complex(re, im)) for a, b, re, im in it["coeffs"])
            out.append(BigradedHarmonic(it["d"], it["m"], it["n"], it["j"], table))
        else:
            table = tuple((tuple(e), float(c)) for e, c in it["coeffs"])
            out.append(HarmonicBasisElement(it["d"], it["m"], it["j"], table))
    return out
