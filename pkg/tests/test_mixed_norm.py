import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from riesz_hermite import mixed_norm as MN
from riesz_hermite import operators as OP

from . import oracles


def test_mu_alpha_against_quadrature():
    for a, b, al in ((0.0, 1.0, 0.5), (0.3, 2.2, 0.0), (1.0, 4.0, 1.5)):
        ref = oracles.quad(lambda r: r ** (2 * al + 1), a, b)
        assert MN.mu_alpha(a, b, al) == pytest.approx(ref, rel=1e-13)
    with pytest.raises(ValueError, match="invalid-argument"):
        MN.mu_alpha(-1.0, 1.0, 0.5)
    with pytest.raises(ValueError, match="invalid-argument"):
        MN.mu_alpha(2.0, 1.0, 0.5)


def test_ball_measure_clips_at_zero():
    assert MN.ball_measure(1.0, 3.0, 0.5) == pytest.approx(MN.mu_alpha(0.0, 4.0, 0.5))
    with pytest.raises(ValueError):
        MN.ball_measure(0.0, 1.0, 0.5)


def test_ball_comparability_bounded():
    lo, hi = MN.ball_comparability(3)
    assert 0 < lo <= hi < 10


def test_weight_spec_validation_and_interpolation():
    with pytest.raises(ValueError):
        MN.WeightSpec("exotic")
    with pytest.raises(ValueError):
        MN.WeightSpec.power(0.5, p=1.0)
    with pytest.raises(ValueError):
        MN.WeightSpec("tabulated", grid=(1.0, 2.0), values=(1.0, -1.0))
    grid = tuple(np.geomspace(0.01, 100, 9))
    tab = MN.WeightSpec("tabulated", grid=grid, values=tuple(np.asarray(grid) ** -0.4))
    r = np.array([0.02, 0.7, 33.0])
    assert np.allclose(tab(r), r**-0.4, rtol=1e-12)
    w = MN.WeightSpec.power(0.3, 0.5, 3.0)
    assert w.dual_exponent == pytest.approx(0.5)
    assert w.admissible_range() == (-3.0, 6.0)
    assert MN.WeightSpec(**w.as_dict()) == w


def test_unit_weight_constant_is_one():
    for p in (1.5, 2.0, 3.0):
        assert MN.ap_constant(MN.WeightSpec.unit(0.5, p)).constant == pytest.approx(1.0, abs=1e-12)


def _ap_interval_oracle(gamma, alpha, p, a, b):
    mass = oracles.quad(lambda r: r ** (2 * alpha + 1), a, b)
    v1 = oracles.quad(lambda r: r ** (gamma + 2 * alpha + 1), a, b) / mass
    v2 = oracles.quad(lambda r: r ** (-gamma / (p - 1) + 2 * alpha + 1), a, b) / mass
    return v1 * v2 ** (p - 1)


@pytest.mark.parametrize("gamma,p", [(0.7, 2.0), (-1.2, 3.0), (0.4, 1.5)])
def test_ap_constant_interval_values(gamma, p):
    fam = [(0.0, 1.0), (0.5, 3.0), (2.0, 2.5)]
    res = MN.ap_constant(MN.WeightSpec.power(gamma, 0.5, p), fam)
    for (a, b), v in zip(fam, res.per_interval):
        assert v == pytest.approx(_ap_interval_oracle(gamma, 0.5, p, a, b), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.sampled_from([1.5, 2.0, 3.0]), st.sampled_from([0.0, 0.5, 1.0]))
def test_power_weights_inside_range_are_finite(frac, p, alpha):
    lo, hi = MN.WeightSpec.unit(alpha, p).admissible_range()
    gamma = lo + frac * (hi - lo)
    res = MN.ap_constant(MN.WeightSpec.power(gamma, alpha, p))
    assert res.finite and res.constant >= 1 - 1e-12


@pytest.mark.parametrize("side", ["lo", "hi"])
def test_power_weights_outside_range_blow_up(side):
    alpha, p = 0.5, 2.0
    lo, hi = MN.WeightSpec.unit(alpha, p).admissible_range()
    g = lo - 0.1 if side == "lo" else hi + 0.1
    w = MN.WeightSpec.power(g, alpha, p)
    res = MN.ap_constant(w)
    assert not res.finite and res.nonintegrable
    seq = [MN.ap_constant(w, MN.refined_family(L)).constant for L in (2, 4, 8, 12)]
    assert all(b > a for a, b in zip(seq, seq[1:]))


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_ap_duality(p):
    g = 0.8
    c1 = MN.ap_constant(MN.WeightSpec.power(g, 0.5, p)).constant
    c2 = MN.ap_constant(MN.WeightSpec.power(-g / (p - 1), 0.5, p / (p - 1))).constant
    assert c1 == pytest.approx(c2 ** (p - 1), rel=1e-10)


def test_ap_rejects_bad_family():
    with pytest.raises(ValueError):
        MN.ap_constant(MN.WeightSpec.unit(), [(1.0, 0.5)])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_radial_bridging(d):
    assert MN.radial_bridging_probe(MN.WeightSpec.power(-0.6), d) < 1e-10


def test_mixed_norm_p2_unit_weight_is_l2_norm():
    f = OP.random_band_limited("hermite", 3, 3, np.random.default_rng(0), modes=6)
    assert MN.mixed_norm(f, 2.0, MN.WeightSpec.unit(), 3) == pytest.approx(f.norm(), rel=1e-12)
    g = OP.random_band_limited("special_hermite", 1, 3, np.random.default_rng(1))
    assert MN.mixed_norm(g, 2.0, MN.WeightSpec.unit(), 1) == pytest.approx(g.norm(), rel=1e-12)


@pytest.mark.parametrize("p,gamma", [(3.0, 0.5), (1.5, -1.0), (2.5, 2.0)])
def test_mixed_norm_radial_gaussian(p, gamma):
    def f(x):
        return np.exp(-0.5 * np.sum(x * x, axis=-1))

    ref = oracles.quad(lambda r: (4 * math.pi) ** (p / 2) * math.exp(-p * r * r / 2) * r ** (gamma + 2), 0, 40) ** (1 / p)
    got = MN.mixed_norm(f, p, MN.WeightSpec.power(gamma), 3, cutoff=0)
    assert got == pytest.approx(ref, rel=1e-12)


def test_mixed_norm_rejects_nonintegrable_weight():
    with pytest.raises(ValueError):
        MN.mixed_norm(lambda x: np.ones(len(x)), 2.0, MN.WeightSpec.power(-3.5), 3, cutoff=0)


def test_auxiliary_integral_reference_value():
    A, B, c, lam = 2.0, 1.0, 1.0, 0.5
    ref = float(mp.quad(lambda u: (1 - u) ** (c - 0.5) * (A - B * u) ** (-(c + lam + 0.5)), [0, 1]))
    assert MN.lemma24_integral(A, B, c, lam) == pytest.approx(ref, rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-4, -0.01), st.floats(0.5, 3.0), st.floats(0.1, 2.0))
def test_auxiliary_integral_random_tuples(logA, logGap, c, lam):
    A = 10**logA
    B = A * (1 - 10**logGap)
    assume(0 < B < A)
    ref = float(mp.quad(lambda u: (1 - u) ** (c - 0.5) * (A - B * u) ** (-(c + lam + 0.5)), [0, 1 - (A - B) / B if B > A / 2 else 0.5, 1]))
    assert MN.lemma24_integral(A, B, c, lam) == pytest.approx(ref, rel=1e-9)


def test_auxiliary_integral_validation():
    with pytest.raises(ValueError, match="invalid-argument"):
        MN.lemma24_integral(1.0, 2.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        MN.lemma24_integral(2.0, 1.0, 0.2, 0.5)


def test_auxiliary_ratio_bounded():
    rep = MN.lemma24_report(200, seed=3)
    assert len(rep.ratios) == 200
    assert all(math.isfinite(v) and v > 0 for v in rep.ratios)


def test_ratio_report_round_trip():
    rep = MN.RatioReport("R_j", 2.0, {"kind": "power"}, [0.5, 0.25], {"seed": 1}, [1.0, 2.0], [0.5, 0.5])
    back = MN.RatioReport.from_json(rep.to_json())
    assert back == rep
    assert back.summary()["max"] == 0.5
    rows = rep.to_csv().strip().splitlines()
    assert rows[0] == "trial,input,output,ratio"
    assert rows[2] == "1,2.0,0.5,0.25"
    assert MN.RatioReport("x", 2.0, {}, []).summary() == {"count": 0}


def test_norm_ratio_experiment_deterministic_and_order_free():
    a = MN.norm_ratio_experiment("R_j", 3.0, MN.WeightSpec.power(0.5), trials=6, seed=4)
    b = MN.norm_ratio_experiment("R_j", 3.0, MN.WeightSpec.power(0.5), trials=6, seed=4)
    assert a.to_json() == b.to_json()
    c = MN.norm_ratio_experiment("R_j", 3.0, MN.WeightSpec.power(0.5), trials=3, seed=4)
    assert np.allclose(c.ratios, a.ratios[:3], rtol=1e-13)


def test_unweighted_l2_ratio_is_a_contraction():
    rep = MN.norm_ratio_experiment("R_j", 2.0, None, trials=10, seed=0)
    assert rep.max <= 1 + 1e-9
    rep = MN.norm_ratio_experiment("S_j", 2.0, None, trials=10, seed=0)
    assert rep.max <= 1 + 1e-9


def test_inadmissible_weight_rejected():
    hi = MN.WeightSpec.unit(0.5, 2.0).admissible_range()[1]
    w = MN.WeightSpec.power(hi + 0.5)
    with pytest.raises(ValueError, match="inadmissible"):
        MN.norm_ratio_experiment("R_j", 2.0, w, trials=2)
    rep = MN.norm_ratio_experiment("R_j", 2.0, w, trials=2, allow_inadmissible=True)
    assert rep.metadata["ap_constant"] == "inf"
    with pytest.raises(ValueError):
        MN.norm_ratio_experiment("T_j", 2.0)


@pytest.mark.parametrize("op", ["laguerre_vector", "A5", "ineq_B", "ineq_C"])
def test_other_operators_finite(op):
    rep = MN.norm_ratio_experiment(op, 1.5, MN.WeightSpec.power(0.2), trials=4, seed=2)
    assert all(math.isfinite(v) and v >= 0 for v in rep.ratios)
    json.loads(rep.to_json())


def test_negative_control_shape():
    out = MN.negative_control("R_j", 2.0, trials=4)
    assert [e for e, _ in out] == [1e-2, 1e-4, 1e-6]
    assert all(v > 0 for _, v in out)


@pytest.mark.parametrize("tag", MN.KERNEL_TAGS)
def test_kernel_decay_report_finite(tag):
    kw = {"m": 2} if tag.startswith("km") else {}
    rep = MN.kernel_decay_report(tag, d=3, samples=20, seed=1, **kw)
    assert rep.max > 0 and math.isfinite(rep.max)
    with pytest.raises(ValueError):
        MN.kernel_decay_report("bogus")


def test_hormander_report_finite():
    rep = MN.hormander_report(3, pairs=[(1.0, 1.1), (2.0, 2.3)])
    assert len(rep.ratios) == 2 and all(math.isfinite(v) for v in rep.ratios)
