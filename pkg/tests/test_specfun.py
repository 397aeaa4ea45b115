import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_hermite import specfun as S
from riesz_hermite.quadrature import complex_sphere_rule, composite_rule, sphere_rule

from . import oracles

XS = np.array([-6.0, -2.3, -0.7, 0.0, 0.4, 1.9, 5.5])


@pytest.mark.parametrize("k", [0, 1, 2, 5, 13, 30])
def test_hermite_fn_against_mpmath(k):
    ref = np.array([oracles.hermite_function(k, x) for x in XS])
    assert np.max(np.abs(S.hermite_fn(k, XS) - ref)) < 1e-13


@pytest.mark.parametrize("k", [0, 3, 9, 16])
def test_hermite_explicit_sum_matches_recurrence(k):
    assert np.allclose(S.hermite_fn_rodrigues(k, XS), S.hermite_fn(k, XS), atol=1e-12)


@pytest.mark.parametrize("k", [0, 1, 4, 10])
def test_hermite_derivative_by_finite_differences(k):
    fd = oracles.fd1(lambda x: S.hermite_fn(k, x), XS)
    assert np.max(np.abs(S.hermite_fn_deriv(k, XS) - fd)) < 1e-9


def test_hermite_orthonormal():
    rule = composite_rule(np.linspace(-14, 14, 29), 24)
    tab = S.hermite_fn_table(20, rule.nodes)
    gram = (tab * rule.weights) @ tab.T
    assert np.max(np.abs(gram - np.eye(21))) < 1e-13


def test_hermite_multi_product():
    x = np.array([[0.3, -1.2, 0.8]])
    want = S.hermite_fn(2, 0.3) * S.hermite_fn(0, -1.2) * S.hermite_fn(3, 0.8)
    assert S.hermite_fn_multi((2, 0, 3), x)[0] == pytest.approx(want)
    with pytest.raises(ValueError):
        S.hermite_fn_multi((1, 1), x)


@pytest.mark.parametrize("d,n", [(1, 4), (2, 3), (3, 4)])
def test_multi_indices_count(d, n):
    idx = S.multi_indices(d, n)
    assert len(idx) == math.comb(n + d, d)
    assert len(set(idx)) == len(idx)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5, 3.2])
@pytest.mark.parametrize("k", [0, 1, 4, 12])
def test_laguerre_against_mpmath(k, alpha):
    x = np.array([0.0, 0.3, 1.7, 6.0, 14.0])
    ref = np.array([oracles.laguerre(k, alpha, v) for v in x])
    scale = max(1.0, np.max(np.abs(ref)))
    assert np.max(np.abs(S.laguerre_poly(k, alpha, x) - ref)) / scale < 1e-12
    # the alternating explicit sum cancels badly for large x
    small = x <= 6
    assert np.max(np.abs(S.laguerre_poly_explicit(k, alpha, x[small]) - ref[small])) / scale < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 15), st.floats(0.0, 4.0), st.floats(0.0, 5.0))
def test_psi_and_phi_against_mpmath(k, alpha, r):
    assert S.psi(k, alpha, r) == pytest.approx(oracles.psi(k, alpha, r), abs=1e-12)
    assert S.phi_small(k, alpha, r) == pytest.approx(oracles.phi_small(k, alpha, r), abs=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
def test_psi_orthonormal(alpha):
    rule = composite_rule(np.linspace(0, 12, 25), 24)
    tab = S.psi_table(8, alpha, rule.nodes)
    gram = (tab * rule.weights * rule.nodes ** (2 * alpha + 1)) @ tab.T
    assert np.max(np.abs(gram - np.eye(9))) < 1e-12


@pytest.mark.parametrize("delta", [0, 1, 2])
def test_phi_small_orthonormal(delta):
    rule = composite_rule(np.linspace(0, 20, 41), 24)
    tab = S.phi_small_table(8, delta, rule.nodes)
    gram = (tab * rule.weights * rule.nodes ** (2 * delta + 1)) @ tab.T
    assert np.max(np.abs(gram - np.eye(9))) < 1e-12


@pytest.mark.parametrize("k", [0, 2, 5])
def test_psi_derivative(k):
    r = np.linspace(0.2, 3.0, 9)
    fd = oracles.fd1(lambda v: S.psi(k, 0.5, v), r)
    assert np.max(np.abs(S.psi_deriv(k, 0.5, r) - fd)) < 1e-9


def test_laguerre_rejects_bad_parameters():
    with pytest.raises(ValueError):
        S.laguerre_table(3, -1.0, 0.5)
    with pytest.raises(ValueError):
        S.psi(2, -0.7, 0.5)
    with pytest.raises(ValueError):
        S.hermite_fn(-1, 0.5)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 1.0, 2.3, 7.5])
def test_bessel_against_mpmath(alpha):
    x = np.array([0.0, 1e-6, 0.3, 2.0, 15.0, 19.9, 20.1, 45.0, 300.0])
    got = S.bessel_i(alpha, x[x < 300])
    for g, v in zip(got, x[x < 300]):
        ref = oracles.besseli(alpha, v)
        assert g == pytest.approx(ref, rel=1e-12, abs=1e-300)
    scaled = S.bessel_i_scaled(alpha, 300.0)
    ref = float(oracles.mp.besseli(alpha, 300) * oracles.mp.exp(-300))
    assert scaled == pytest.approx(ref, rel=1e-12)


def test_bessel_routes_overlap():
    x = np.linspace(18, 40, 12)
    for alpha in (0.0, 1.5, 4.0):
        a = S.bessel_i_scaled(alpha, x, route="series")
        b = S.bessel_i_scaled(alpha, x, route="asymptotic")
        assert np.max(np.abs(a / b - 1)) < 1e-12


def test_bessel_domain():
    with pytest.raises(ValueError):
        S.bessel_i(-0.8, 1.0)
    with pytest.raises(ValueError):
        S.bessel_i(0.5, -1.0)


@pytest.mark.parametrize("m", [0, 1, 2, 5])
def test_gegenbauer_normalisation(m):
    u = np.linspace(-1, 1, 11)
    assert S.gegenbauer_norm(m, 3, 1.0) == pytest.approx(1.0)
    ref3 = np.array([float(oracles.mp.legendre(m, v)) for v in u])
    assert np.allclose(S.gegenbauer_norm(m, 3, u), ref3, atol=1e-13)
    assert np.allclose(S.gegenbauer_norm(m, 2, u), np.cos(m * np.arccos(u)), atol=1e-13)
    ref4 = np.array([float(oracles.mp.chebyu(m, v)) / (m + 1) for v in u])
    assert np.allclose(S.gegenbauer_norm(m, 4, u), ref4, atol=1e-13)


def _harmonic_dim(d, m):
    return math.comb(m + d - 1, d - 1) - (math.comb(m + d - 3, d - 1) if m >= 2 else 0)


def _fd_laplacian(fn, x, h=1e-3):
    out = 0
    for i in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[i] = h
        out = out + oracles.fd2(lambda t: fn(x + t[:, None] * e), np.zeros(len(x)), h)
    return out


@pytest.mark.parametrize("d,m", [(2, 0), (2, 3), (3, 1), (3, 2), (3, 4), (4, 2), (4, 3)])
def test_real_basis_orthonormal_and_harmonic(d, m):
    basis = S.real_spherical_basis(d, m)
    assert len(basis) == _harmonic_dim(d, m)
    rule = sphere_rule(d, m + 2)
    vals = np.array([Y(rule.nodes) for Y in basis])
    gram = (vals * rule.weights) @ vals.T
    assert np.max(np.abs(gram - np.eye(len(basis)))) < 1e-12
    x = np.random.default_rng(0).standard_normal((5, d))
    for Y in basis:
        scale = np.max(np.abs(Y(x))) + 1
        assert np.max(np.abs(_fd_laplacian(Y, x))) / scale < 1e-6
        # homogeneity of degree m
        assert np.allclose(Y(2.0 * x), 2.0**m * Y(x))


def test_tangential_gradient_is_tangent():
    Y = S.real_spherical_basis(3, 2)[1]
    omega = np.random.default_rng(1).standard_normal((6, 3))
    omega /= np.linalg.norm(omega, axis=1, keepdims=True)
    tg = Y.tangential_gradient(omega)
    assert np.max(np.abs(np.sum(tg * omega, axis=1))) < 1e-13


def _bigraded_dim(d, m, n):
    if d == 1:
        return 1 if min(m, n) == 0 else 0
    return m + n + 1


@pytest.mark.parametrize("d,m,n", [(1, 0, 0), (1, 3, 0), (1, 0, 2), (1, 1, 1), (2, 1, 0), (2, 1, 1), (2, 2, 1), (2, 0, 3)])
def test_bigraded_basis(d, m, n):
    basis = S.bigraded_basis(d, m, n)
    assert len(basis) == _bigraded_dim(d, m, n)
    if not basis:
        return
    rule = complex_sphere_rule(d, m + n + 2)
    vals = np.array([Y(rule.nodes) for Y in basis])
    gram = (vals * rule.weights) @ vals.conj().T
    assert np.max(np.abs(gram - np.eye(len(basis)))) < 1e-12
    z = np.array([[0.7 - 0.2j, 0.1 + 0.5j][:d]])
    th = 0.37
    for Y in basis:
        # bidegree (m, n): Y(e^{i th} z) = e^{i (m - n) th} Y(z)
        assert Y(np.exp(1j * th) * z)[0] == pytest.approx(np.exp(1j * (m - n) * th) * Y(z)[0], abs=1e-13)
        x = np.concatenate([z.real, z.imag], axis=1)
        lap = _fd_laplacian(lambda p: Y(p[:, :d] + 1j * p[:, d:]), x)
        assert abs(lap[0]) < 1e-6


def test_basis_ranges():
    with pytest.raises(ValueError, match="unsupported-range"):
        S.real_spherical_basis(5, 1)
    with pytest.raises(ValueError, match="unsupported-range"):
        S.bigraded_basis(3, 1, 0)


def test_basis_json_round_trip():
    basis = S.real_spherical_basis(3, 2) + S.bigraded_basis(2, 1, 1)
    back = S.basis_from_json(S.basis_to_json(basis))
    assert back == basis


def test_poly_algebra():
    x = S.Poly.variable(2, 0)
    y = S.Poly.variable(2, 1)
    p = x * x - y * y
    assert p.laplacian() == S.Poly(2)
    assert not p.laplacian()
    q = (x + y) * (x - y)
    assert q == p
    assert p.diff(0) == x.scale(2)
    assert p.degree() == 2
    pts = np.array([[1.5, 0.5]])
    assert p(pts)[0] == pytest.approx(2.0)
