import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from rbflt.laplace_inversion import (
    ContourSpec, ContourWindowWarning, build_contour, contour_arrays, error_estimate, imag_leakage, invert,
    calibration_pairs, invert_full, load_presets, preset_contour, suite_error, transform_pair_suite,
)

WINDOWS = [(0.5, 5.0), (0.3, 3.0)]


def test_parabolic_nodes():
    nodes = build_contour(ContourSpec("parabolic", 4, 0.1, 1.0, 0.5, 5.0))
    assert nodes[0].point == 1 + 0j and nodes[0].weight == 2j
    assert nodes[1].point == pytest.approx(0.99 + 0.2j, abs=1e-15)
    assert nodes[1].weight == pytest.approx(2 * (-0.1 + 1j), abs=1e-15)
    assert [n.index for n in nodes] == list(range(5))


def test_hyperbolic_node():
    n0 = build_contour(ContourSpec("hyperbolic", 3, 0.2, 1.0, 0.5, 5.0, angle=math.pi / 6))[0]
    assert n0.point == pytest.approx(0.5, abs=1e-15)
    assert n0.weight == pytest.approx(0.8660254j, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(["parabolic", "hyperbolic"]), v=st.floats(0.1, 50), h=st.floats(0.01, 1),
       kappa=st.floats(-1, 0.9), angle=st.floats(0.05, 1.5), M=st.integers(1, 60))
def test_nodes_follow_formula(kind, v, h, kappa, angle, M):
    spec = ContourSpec(kind, M, h, v, 0.1, 1.0, kappa=kappa, angle=angle)
    s, w = contour_arrays(spec)
    z = h * np.arange(M + 1)
    if kind == "parabolic":
        re = v * ((1 - kappa) ** 2 - z**2)
    else:
        re = v * (1 - np.sin(angle) * np.cosh(z))
    assert np.allclose(s.real, re, rtol=1e-15, atol=1e-15 * np.max(np.abs(re)))
    # numerical derivative of the path agrees with the stored weight
    d = 1e-6
    hi = ContourSpec(kind, 1, d, v, 0.1, 1.0, kappa=kappa, angle=angle)
    s_d, _ = contour_arrays(hi)
    assert abs((s_d[1] - s_d[0]) / d - w[0]) <= 1e-4 * max(1, abs(w[0]))


@pytest.mark.parametrize("kw", [
    dict(kind="elliptic"), dict(M=0), dict(h=-1.0), dict(v=0.0), dict(t0=0.0), dict(T=0.01),
    dict(kind="hyperbolic", angle=1.6), dict(kind="hyperbolic", omega=-1.0), dict(kappa=1.0),
])
def test_contour_validation(kw):
    base = dict(kind="parabolic", M=10, h=0.1, v=1.0, t0=0.1, T=1.0)
    base.update(kw)
    with pytest.raises(ValueError):
        ContourSpec(**base)


def test_error_estimate():
    assert error_estimate(0.5, 60) == pytest.approx(6.5742e-4, rel=5e-5)
    for M, ref in zip((45, 61, 71, 91), (2.7103e-3, 5.9954e-4, 2.4163e-4, 4.1627e-5)):
        assert error_estimate(0.5, M) == pytest.approx(ref, rel=5e-5)
    vals = [error_estimate(0.7, M) for M in range(3, 200)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        error_estimate(0.5, 1)


@pytest.mark.parametrize("kind", ["parabolic", "hyperbolic"])
@pytest.mark.parametrize("window", WINDOWS)
def test_pair_suite(kind, window):
    spec = preset_contour(kind, *window, 40)
    assert suite_error(spec, n_times=20, pairs=transform_pair_suite()) <= 1e-6


@pytest.mark.parametrize("kind", ["parabolic", "hyperbolic"])
def test_inversion_examples(kind):
    spec = preset_contour(kind, 0.5, 5.0, 40)
    s = np.array([n.point for n in build_contour(spec)])
    assert invert(1 / s, spec, 1.0) == pytest.approx(1.0, rel=1e-6)
    assert invert(1 / s**2, spec, 0.7) == pytest.approx(0.7, rel=1e-6)
    assert invert(gamma(1.5) / s**1.5, spec, 1.0) == pytest.approx(1.0, abs=1e-6)


def test_trailing_axes_and_errors():
    spec = preset_contour("parabolic", 0.5, 5.0, 40)
    s = np.array([n.point for n in build_contour(spec)])
    stacked = np.stack([1 / s, 1 / s**2], axis=1)
    out = invert(stacked, spec, 2.0)
    assert out.shape == (2,) and np.allclose(out, [1.0, 2.0], rtol=1e-6)
    with pytest.raises(ValueError):
        invert(1 / s[:-1], spec, 1.0)
    with pytest.raises(ValueError):
        invert(np.full(s.shape, np.nan), spec, 1.0)
    with pytest.warns(ContourWindowWarning):
        invert(1 / s, spec, 10.0)
    with pytest.raises(OverflowError, match="j=0"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ContourWindowWarning)
            invert(1 / s, spec, 1e4)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["parabolic", "hyperbolic"]))
def test_reduced_equals_full_sum(seed, kind):
    rng = np.random.default_rng(seed)
    spec = preset_contour(kind, 0.5, 5.0, 40)
    # random rational transform with real coefficients: conj-symmetric by construction
    poles = -rng.uniform(0.5, 3.0, 3)
    coef = rng.normal(size=3)
    F = lambda s: sum(c / (s - p) for c, p in zip(coef, poles))
    s, _ = contour_arrays(spec)
    t = float(rng.uniform(0.5, 5.0))
    reduced = invert(F(s), spec, t)
    full = invert_full(F, spec, t)
    scale = max(abs(reduced), 1e-300)
    assert abs(full.real - reduced) <= 1e-13 * max(scale, np.sum(np.abs(coef)))
    assert abs(full.imag) <= 1e-13 * max(scale, np.sum(np.abs(coef)))


def test_leakage_is_small_for_real_data():
    spec = preset_contour("hyperbolic", 0.5, 5.0, 40)
    s, _ = contour_arrays(spec)
    assert imag_leakage(1 / (s + 1), spec, 1.0) <= 1e-8
    # a sample with a spurious imaginary part at j = 0 shows up
    bad = 1 / (s + 1) + 1e-3j
    assert imag_leakage(bad, spec, 1.0) > 1e-8


def test_presets_are_keyed():
    presets = load_presets()
    assert presets, "contour presets should ship with the package"
    for key, p in presets.items():
        spec = preset_contour(p["kind"], p["t0"], p["T"], p["M"], p["suite"], p.get("oscillation"))
        assert spec.h == p["h"] and spec.v == p["v"]


def test_calibration_suites():
    base = transform_pair_suite()
    manufactured = calibration_pairs(suite="manufactured")
    assert [p[0] for p in manufactured[:len(base)]] == [p[0] for p in base]
    assert len(manufactured) > len(base)
    assert len(calibration_pairs((20 * np.pi, 5.0), "transform-pairs")) == len(base) + 1
    with pytest.raises(ValueError, match="suite"):
        calibration_pairs(suite="nope")
    with pytest.raises(ValueError, match="suite"):
        preset_contour("parabolic", 0.5, 5.0, 40, "nope")
