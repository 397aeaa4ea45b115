import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_hermite import operators as OP

from . import oracles


def _rng(seed=0):
    return np.random.default_rng(seed)


def test_band_limited_validation():
    with pytest.raises(ValueError):
        OP.BandLimitedFunction("fourier", 1, {}, 2)
    with pytest.raises(ValueError):
        OP.BandLimitedFunction("hermite", 2, {(1,): 1.0}, 2)
    with pytest.raises(ValueError):
        OP.BandLimitedFunction("hermite", 1, {(3,): 1.0}, 2)
    with pytest.raises(ValueError):
        OP.BandLimitedFunction("laguerre", -0.8, {0: 1.0}, 2)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([("hermite", 2), ("laguerre", 0.5), ("special_hermite", 1)]), st.integers(0, 2**31))
def test_band_limited_json_round_trip(spec, seed):
    f = OP.random_band_limited(*spec, 3, np.random.default_rng(seed))
    back = OP.BandLimitedFunction.from_json(f.to_json())
    assert back == f
    assert back.to_json() == f.to_json()


@pytest.mark.parametrize("basis,param,pts", [
    ("hermite", 1, np.array([[-0.7], [1.3]])),
    ("hermite", 3, np.array([[0.1, -0.4, 0.8]])),
    ("laguerre", 1.5, np.array([0.2, 1.4])),
    ("special_hermite", 1, np.array([[0.5 - 0.3j], [1.2 + 0.2j]])),
    ("special_hermite", 2, np.array([[0.5 - 0.3j, 0.2 + 0.6j]])),
])
def test_expand_recovers_coefficients(basis, param, pts):
    f = OP.random_band_limited(basis, param, 3, _rng(1))
    g = OP.expand(f, basis, param, 3)
    assert set(g.coeffs) <= set(f.coeffs) | set(g.coeffs)
    worst = max(abs(g.coeffs.get(k, 0) - c) for k, c in f.coeffs.items())
    assert worst < 1e-11
    assert np.allclose(OP.synthesize(g, pts), OP.synthesize(f, pts), atol=1e-11)


def test_expand_resolution_guard():
    with pytest.raises(OP.ResolutionError):
        OP.expand(lambda x: np.ones(len(x)), "hermite", 1, 4, nodes=3)


def test_eigenvalues():
    assert OP.eigenvalue("hermite", 3, (1, 0, 2)) == 9
    assert OP.eigenvalue("laguerre", 0.5, 2) == 11
    assert OP.eigenvalue("special_hermite", 2, (1, 3, 1, 2)) == 8


def _fd_partial(fn, x, j, h=1e-4):
    e = np.zeros(x.shape[-1])
    e[j] = 1.0
    return oracles.fd1(lambda t: fn(x + t * e), 0.0, h)


@pytest.mark.parametrize("d", [1, 2])
def test_ladder_matches_finite_differences(d):
    f = OP.random_band_limited("hermite", d, 4, _rng(d))
    x = _rng(9).uniform(-1.5, 1.5, (5, d))
    for j in range(1, d + 1):
        got = OP.synthesize(OP.ladder(j, "annihilate", f), x)
        fd = _fd_partial(lambda p: OP.synthesize(f, p), x, j - 1)
        assert np.allclose(got, fd + x[:, j - 1] * OP.synthesize(f, x), atol=1e-8)
        got = OP.synthesize(OP.ladder(j, "create", f), x)
        assert np.allclose(got, -fd + x[:, j - 1] * OP.synthesize(f, x), atol=1e-8)


def test_ladder_factorises_hermite_operator():
    f = OP.random_band_limited("hermite", 2, 4, _rng(4))
    total = None
    for j in (1, 2):
        g = OP.ladder(j, "create", OP.ladder(j, "annihilate", f))
        total = g if total is None else total + g
    for mu, c in f.coeffs.items():
        assert total.coeffs.get(mu, 0) == pytest.approx((OP.eigenvalue("hermite", 2, mu) - 2) * c)


def test_heat_routes_hermite_d1():
    f = OP.random_band_limited("hermite", 1, 5, _rng(2))
    x = np.array([[-1.0], [0.3], [2.1]])
    a = OP.heat_apply(f, 0.3, route="kernel_integral", points=x)
    b = OP.synthesize(OP.heat_apply(f, 0.3), x)
    assert np.max(np.abs(a - b)) < 1e-9
    with pytest.raises(ValueError):
        OP.heat_apply(f, 0.0)


@pytest.mark.parametrize("basis,param", [("hermite", 3), ("laguerre", 0.0), ("special_hermite", 2)])
def test_half_inverse_routes(basis, param):
    f = OP.random_band_limited(basis, param, 4, _rng(5))
    a = OP.half_inverse(f)
    b = OP.half_inverse(f, route="subordination")
    for k, c in f.coeffs.items():
        lam = OP.eigenvalue(basis, param, k)
        assert a.coeffs[k] == pytest.approx(c / math.sqrt(lam), rel=1e-14)
        assert b.coeffs[k] == pytest.approx(c / math.sqrt(lam), rel=1e-11)


@pytest.mark.parametrize("d", [1, 2])
def test_hermite_riesz_matches_finite_differences(d):
    f = OP.random_band_limited("hermite", d, 4, _rng(6))
    h = OP.half_inverse(f)
    x = _rng(7).uniform(-1.5, 1.5, (4, d))
    for j in range(1, d + 1):
        fd = _fd_partial(lambda p: OP.synthesize(h, p), x, j - 1)
        want = fd + x[:, j - 1] * OP.synthesize(h, x)
        assert np.allclose(OP.hermite_riesz(j, f, x), want, atol=1e-8)


def test_hermite_riesz_kernel_route_d1():
    f = OP.random_band_limited("hermite", 1, 3, _rng(8))
    x = np.array([[-0.8], [0.4], [1.6]])
    a = OP.hermite_riesz(1, f, x)
    b = OP.hermite_riesz(1, f, x, route="kernel_integral")
    assert np.max(np.abs(a - b)) < 1e-5


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**31))
def test_riesz_square_sum_identity(d, seed):
    """sum_j |R_j f|^2 = |f|^2 - d |H^{-1/2} f|^2 since sum_j A_j^* A_j = H - d."""
    f = OP.random_band_limited("hermite", d, 4, np.random.default_rng(seed))
    lhs = sum(OP.hermite_riesz(j, f).norm() ** 2 for j in range(1, d + 1))
    rhs = f.norm() ** 2 - d * OP.half_inverse(f).norm() ** 2
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert all(OP.hermite_riesz(j, f).norm() <= f.norm() for j in range(1, d + 1))


@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
def test_laguerre_riesz_matches_finite_differences(alpha):
    g = OP.random_band_limited("laguerre", alpha, 5, _rng(10))
    h = OP.half_inverse(g)
    r = np.linspace(0.2, 2.5, 7)
    fd = oracles.fd1(lambda v: OP.synthesize(h, v), r)
    assert np.allclose(OP.laguerre_riesz(alpha, g, r), fd + r * OP.synthesize(h, r), atol=1e-8)
    assert np.allclose(OP.laguerre_riesz(alpha, g, r, route="subordination"), OP.laguerre_riesz(alpha, g, r), atol=1e-10)


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("conjugate", [False, True])
def test_special_Z_matches_finite_differences(d, conjugate):
    g = OP.random_band_limited("special_hermite", d, 3, _rng(11))
    z = np.array([[0.6 - 0.2j, -0.3 + 0.9j][:d], [1.1 + 0.4j, 0.2 - 0.1j][:d]])
    for j in range(1, d + 1):
        e = np.zeros(d, dtype=complex)
        e[j - 1] = 1
        dx = oracles.fd1(lambda t: OP.synthesize(g, z + t * e), 0.0)
        dy = oracles.fd1(lambda t: OP.synthesize(g, z + 1j * t * e), 0.0)
        zj = z[:, j - 1]
        if conjugate:
            want = 0.5 * (dx + 1j * dy) - zj / 4 * OP.synthesize(g, z)
        else:
            want = 0.5 * (dx - 1j * dy) + np.conj(zj) / 4 * OP.synthesize(g, z)
        assert np.allclose(OP.special_Z(j, g, z, conjugate=conjugate), want, atol=1e-8)


def test_special_riesz_twisted_route_d1():
    f = OP.random_band_limited("special_hermite", 1, 2, _rng(12))
    z = np.array([[0.3 + 0.5j], [-1.0 + 0.2j]])
    for conj in (False, True):
        a = OP.special_riesz(1, f, z, conjugate=conj)
        b = OP.special_riesz(1, f, z, route="twisted_convolution", conjugate=conj)
        assert np.max(np.abs(a - b)) < 1e-5


def _phi(k):
    from riesz_hermite.specfun import laguerre_phi_fock

    return lambda z: laguerre_phi_fock(k, 1, z)


def test_twisted_convolution_projections():
    z = np.array([[0.4 - 0.1j], [1.3 + 0.7j], [0j]])
    for k in range(3):
        for m in range(3):
            v = OP.twisted_convolve(_phi(k), _phi(m), z, 1) / (2 * math.pi)
            ref = _phi(k)(z) if k == m else 0.0
            assert np.max(np.abs(v - ref)) < 1e-8


def test_twisted_convolution_guards():
    with pytest.raises(ValueError, match="unsupported-dimension"):
        OP.twisted_convolve(_phi(0), _phi(0), np.zeros((1, 3)), 3)
    with pytest.raises(OP.ResolutionError):
        OP.twisted_convolve(_phi(0), _phi(0), np.zeros((1, 1)), 1, radius=3.0)


@pytest.mark.parametrize("basis,d", [("hermite", 2), ("hermite", 3), ("special_hermite", 2)])
def test_rotate_is_unitary_and_pointwise(basis, d):
    rng = _rng(13)
    f = OP.random_band_limited(basis, d, 3, rng)
    if basis == "hermite":
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        pts = rng.standard_normal((3, d))
    else:
        q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        pts = rng.standard_normal((3, d)) + 1j * rng.standard_normal((3, d))
    g = OP.rotate(q, f)
    assert g.norm() == pytest.approx(f.norm(), rel=1e-12)
    assert np.allclose(OP.synthesize(g, pts), OP.synthesize(f, pts @ q.T), atol=1e-11)
    with pytest.raises(ValueError, match="invalid-argument"):
        OP.rotate(2 * np.eye(d), f)


def test_random_band_limited_deterministic():
    a = OP.random_band_limited("special_hermite", 2, 4, np.random.default_rng(42), modes=7)
    b = OP.random_band_limited("special_hermite", 2, 4, np.random.default_rng(42), modes=7)
    assert a == b
    assert len(a.coeffs) == 7
    r = OP.random_band_limited("hermite", 2, 3, np.random.default_rng(1), real=True)
    assert all(c.imag == 0 for c in r.coeffs.values())
