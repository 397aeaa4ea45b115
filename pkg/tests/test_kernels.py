import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_hermite import kernels as K

from . import oracles


@pytest.mark.parametrize("t", [0.2, 0.7])
def test_mehler_d1_against_mpmath_series(t):
    for x, y in ((0.3, -0.8), (1.5, 1.1), (-2.0, 0.4)):
        got = K.mehler(t, np.array([x]), np.array([y]), 1)
        assert got == pytest.approx(oracles.mehler(t, x, y), rel=1e-12)


def test_mehler_d2_factorises():
    x, y = np.array([0.4, -1.0]), np.array([1.2, 0.3])
    t = 0.35
    want = K.mehler(t, x[:1], y[:1], 1) * K.mehler(t, x[1:], y[1:], 1)
    assert K.mehler(t, x, y, 2) == pytest.approx(want, rel=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(-1.0, 1.0))
def test_mehler_polar_matches_cartesian(t, r, s, u):
    x = np.array([r, 0.0, 0.0])
    y = s * np.array([u, math.sqrt(max(0.0, 1 - u * u)), 0.0])
    assert K.mehler_polar(t, r, s, u, 3) == pytest.approx(K.mehler(t, x, y, 3), rel=1e-12, abs=1e-300)


def test_mehler_eigen_series_route():
    x = np.linspace(-2, 2, 5)[:, None, None]
    y = np.linspace(-1, 1.5, 4)[None, :, None]
    a = K.mehler(0.3, x, y, 1)
    b = K.mehler(0.3, x, y, 1, route="eigen_series")
    assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(a))


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5])
def test_laguerre_heat_against_mpmath(alpha):
    for t, r, s in ((0.2, 0.5, 1.3), (1.0, 2.0, 0.1), (0.6, 0.0, 1.0), (0.05, 3.0, 3.2)):
        got = K.laguerre_heat(t, r, s, alpha)
        if r * s == 0:
            ref = float(
                mp.exp(-(r * r + s * s) / (2 * mp.tanh(2 * t))) * (2 * mp.sinh(2 * t)) ** (-alpha) / mp.gamma(alpha + 1) / mp.sinh(2 * t)
            )
        else:
            ref = oracles.laguerre_heat(t, r, s, alpha)
        assert got == pytest.approx(ref, rel=1e-12)


def test_laguerre_heat_large_argument_no_overflow():
    val = K.laguerre_heat(0.01, 30.0, 30.0, 0.5)
    assert math.isfinite(val) and val > 0
    assert val == pytest.approx(oracles.laguerre_heat(0.01, 30.0, 30.0, 0.5), rel=1e-11)


@pytest.mark.parametrize("delta", [0, 1, 2])
def test_k_small_routes(delta):
    r = np.array([0.2, 1.0, 2.5])
    s = np.array([0.7, 1.1, 0.3])
    a = K.k_small(0.4, r, s, delta)
    b = K.k_small(0.4, r, s, delta, route="eigen_series")
    assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(a))


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("t", [0.3, 1.0])
def test_special_heat_closed_form_against_series(d, t):
    for rho in (0.0, 0.8, 2.5):
        z = np.zeros(d, dtype=complex)
        z[0] = rho * np.exp(0.3j)
        got = K.special_heat(t, z, d)
        assert got == pytest.approx(oracles.special_heat_series(t, rho, d), rel=1e-11)


def test_special_heat_radial_flag():
    assert K.special_heat(0.5, 1.2, 2, radial=True) == pytest.approx(K.special_heat(0.5, np.array([1.2, 0]), 2))
    with pytest.raises(ValueError):
        K.special_heat(0.5, 1.2, radial=True)


def test_heat_kernels_reject_nonpositive_time():
    with pytest.raises(ValueError):
        K.mehler(0.0, 0.1, 0.2)
    with pytest.raises(ValueError):
        K.laguerre_heat(-1.0, 0.1, 0.2, 0.5)
    with pytest.raises(ValueError):
        K.mehler(0.5, 0.1, 0.2, route="bogus")


def _riesz_oracle_d1(x, y):
    """pi^{-1/2} int (d/dx + x) K_t(x, y) t^{-1/2} dt, everything in mpmath."""

    def kt(t, a):
        return mp.exp(-mp.coth(t) * (a - y) ** 2 / 4 - mp.tanh(t) * (a + y) ** 2 / 4) / mp.sqrt(2 * mp.pi * mp.sinh(2 * t))

    def integrand(t):
        return (mp.diff(lambda a: kt(t, a), x) + x * kt(t, x)) / mp.sqrt(t)

    return float(mp.quad(integrand, [0, 0.01, 0.1, 1, 10, mp.inf]) / mp.sqrt(mp.pi))


@pytest.mark.parametrize("x,y", [(0.3, 1.1), (-1.0, 0.5), (2.0, -0.4)])
def test_hermite_riesz_kernel_d1_against_mpmath(x, y):
    got = K.hermite_riesz_kernel(1, np.array([x]), np.array([[y]]), 1)[0]
    assert got == pytest.approx(_riesz_oracle_d1(x, y), rel=1e-9)


def test_hermite_riesz_kernel_polar_profiles():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(3)
    y = rng.standard_normal((4, 3))
    r, s = np.linalg.norm(x), np.linalg.norm(y, axis=1)
    u = (y @ x) / (r * s)
    a, b = K.hermite_riesz_ab(r, s, u, 3)
    for j in (1, 2, 3):
        want = x[j - 1] * a + y[:, j - 1] * b
        assert np.allclose(K.hermite_riesz_kernel(j, x, y, 3), want, rtol=1e-12, atol=1e-14)


def test_hermite_riesz_kernel_validation():
    with pytest.raises(K.NearDiagonalError):
        K.hermite_riesz_kernel(1, np.array([0.5, 0.5]), np.array([[0.5, 0.5]]), 2)
    with pytest.raises(ValueError):
        K.hermite_riesz_kernel(3, np.array([0.5, 0.5]), np.array([[1.0, 0.5]]), 2)


def test_special_heat_Z_reduction_by_finite_differences():
    """Z_1 p_t = conj(z)(1 - coth t) p_t / 4 with Z = d/dz + conj(z)/4."""
    t = 0.6
    z0 = 0.7 - 0.4j

    def p(z):
        return K.special_heat(t, np.array([z]), 1)

    dx = oracles.fd1(lambda h: p(z0 + h), 0.0)
    dy = oracles.fd1(lambda h: p(z0 + 1j * h), 0.0)
    zp = 0.5 * (dx - 1j * dy) + np.conj(z0) / 4 * p(z0)
    zbar = 0.5 * (dx + 1j * dy) - z0 / 4 * p(z0)
    coth = 1 / math.tanh(t)
    assert zp == pytest.approx(np.conj(z0) * (1 - coth) * p(z0) / 4, abs=1e-9)
    assert zbar == pytest.approx(-z0 * (1 + coth) * p(z0) / 4, abs=1e-9)


@pytest.mark.parametrize("conjugate", [False, True])
def test_special_riesz_kernel_against_mpmath(conjugate):
    rho = 1.3
    c = K.special_heat(1.0, np.array([0j]), 1) * math.sinh(1.0)

    def integrand(t):
        coth = mp.coth(t)
        w = -(1 + coth) / 4 if conjugate else (1 - coth) / 4
        return w * c * mp.exp(-rho * rho * coth / 4) / mp.sinh(t) / mp.sqrt(t)

    ref = float(mp.quad(integrand, [0, 0.1, 1, 10, mp.inf]) / mp.sqrt(mp.pi))
    z = np.array([rho * np.exp(0.4j)])
    got = K.special_riesz_kernel(1, z, 1, conjugate=conjugate)
    zj = z[0] if conjugate else np.conj(z[0])
    assert got == pytest.approx(zj * ref, rel=1e-9)


def _km_oracle_d3(m, r, s):
    """Funk-Hecke in closed form: int_{-1}^1 e^{au} P_m(u) du = 2 sqrt(pi/(2a)) I_{m+1/2}(a)."""

    def integrand(t):
        sh = mp.sinh(2 * t)
        a = r * s / sh
        ang = 2 * mp.pi * 2 * mp.sqrt(mp.pi / (2 * a)) * mp.besseli(m + 0.5, a)
        return (2 * mp.pi * sh) ** -1.5 * mp.exp(-(r * r + s * s) / (2 * mp.tanh(2 * t))) * ang / mp.sqrt(t)

    return float(mp.quad(integrand, [0, 0.01, 0.1, 1, 10, mp.inf]) / mp.sqrt(mp.pi))


@pytest.mark.parametrize("m", [0, 1, 3])
def test_projected_kernel_against_closed_form_reduction(m):
    got = K.projected_kernel_Km(m, 1.0, 1.6, 3)
    assert got == pytest.approx(_km_oracle_d3(m, 1.0, 1.6), rel=1e-8)


def test_projected_kernel_derivative_by_finite_differences():
    r, s = 1.0, 1.7
    fd = oracles.fd1(lambda v: K.projected_kernel_Km(2, v, s, 3), r, h=1e-3)
    want = fd + r * K.projected_kernel_Km(2, r, s, 3)
    assert K.projected_kernel_Km(2, r, s, 3, deriv=1) == pytest.approx(want, rel=1e-7)


def test_projected_kernel_validation():
    with pytest.raises(K.NearDiagonalError):
        K.projected_kernel_Km(1, 1.0, 1.0, 3)
    with pytest.raises(ValueError, match="unsupported"):
        K.projected_kernel_Km(1, 1.0, 2.0, 5)
    with pytest.raises(ValueError):
        K.projected_kernel_Km(1, 1.0, 2.0, 3, deriv=2)


def test_kernel_query_and_sweep_csv():
    qs = [
        K.KernelQuery("mehler", (np.array([0.1]), np.array([0.4])), 1, t=0.5),
        K.KernelQuery("laguerre_heat", (0.5, 1.0), 1, t=0.5, params={"alpha": 0.5}),
    ]
    text = K.kernel_sweep_csv(qs)
    lines = text.strip().splitlines()
    assert lines[0].startswith("kernel,d,t,route")
    assert len(lines) == 3
    assert K.kernel_sweep_csv(qs) == text
    with pytest.raises(ValueError):
        K.KernelQuery("nonsense", (), 1)
    with pytest.raises(ValueError):
        K.KernelQuery("mehler", (), 1, t=-1.0)
