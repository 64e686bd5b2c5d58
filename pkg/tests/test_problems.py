import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma

from rbflt.problems import (
    BUILTINS, FORCING_PERIOD, PROBES, ManufacturedSolution, make_builtin, manufactured_forcing,
    manufactured_source, periodic_times,
)
from rbflt.solver import ProblemSpec
from rbflt.transform_data import SeparableTransform


def fd(f, x, order, h=1e-3):
    if order == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    if order == 2:
        return (f(x + h) - 2 * f(x) + f(x - h)) / h**2
    return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h**3)


def test_exact_values():
    p1 = make_builtin("problem1").problem
    assert p1.exact(0.0, 1.0) == pytest.approx(3.3333e-4, rel=1e-4)
    p2 = make_builtin("problem2").problem
    assert p2.exact(0.1, 0.1) == pytest.approx(0.005878, abs=5e-7)


@pytest.mark.parametrize("name", ["problem1", "problem2"])
def test_manufactured_residual(name):
    pre = make_builtin(name)
    p, m = pre.problem, pre.manufactured
    rng = np.random.default_rng(11)
    x = rng.uniform(p.a, p.b, 20)
    t = rng.uniform(0.1, 2.0, 20)
    # independent derivatives of the exact solution by finite differences in x
    u = lambda xx: m(xx, t)
    caputo = m.A(x) * gamma(m.p + 1) * t ** (m.p - p.alpha) / gamma(m.p + 1 - p.alpha)
    lhs = caputo + p.eta * u(x) * fd(u, x, 1) - p.xi * fd(u, x, 2) + p.zeta * fd(u, x, 3, h=2e-3)
    src = manufactured_source(m, p.alpha, p.eta, p.xi, p.zeta, x, t)
    scale = np.max(np.abs(src))
    assert np.max(np.abs(lhs - src)) <= 1e-4 * scale  # finite-difference oracle
    # the analytic derivatives close the residual to rounding
    exact_lhs = caputo + p.eta * m.A(x) * m.dA(x) * t ** (2 * m.p) - p.xi * m.d2A(x) * t**m.p + p.zeta * m.d3A(x) * t**m.p
    assert np.max(np.abs(exact_lhs - src)) <= 1e-12 * scale


def test_forcing_matches_numerical_transform():
    pre = make_builtin("problem1")
    m, p = pre.manufactured, pre.problem
    f = SeparableTransform([(prof(np.array([0.7])), fac) for prof, fac in manufactured_forcing(m, p.alpha, 1, 0, 1)])
    s = 2.0
    src = lambda t: manufactured_source(m, p.alpha, 1.0, 0.0, 1.0, np.array([0.7]), t)[0]
    ref = quad(lambda t: math.exp(-s * t) * src(t), 0, 60, limit=400, epsrel=1e-12)[0]
    assert f(s)[0].real == pytest.approx(ref, rel=1e-8)
    # nonlinear term alone: A A' Gamma(11) / s^11
    nl = manufactured_forcing(m, p.alpha, 1.0, 0.0, 0.0)[1]
    x0 = 0.7
    ref_nl = quad(lambda t: math.exp(-s * t) * m.A(x0) * m.dA(x0) * t**10, 0, 80, epsrel=1e-12)[0]
    assert nl[0](x0) * nl[1](s) == pytest.approx(ref_nl, rel=1e-10)


def test_problem2_first_term():
    m = make_builtin("problem2").manufactured
    alpha = 0.4
    prof, fac = manufactured_forcing(m, alpha, 0, 0, 0)[0]
    s = 3.0 + 1j
    assert fac(s) == pytest.approx(2.0 / s ** (3 - alpha))
    assert len(manufactured_forcing(m, alpha, 0, 0, 0)) == 1


@settings(max_examples=20, deadline=None)
@given(x=st.floats(0.05, 0.95), t=st.floats(0.05, 2.0))
def test_problem3_exact_solves_burgers(x, t):
    p = make_builtin("problem3").problem
    u = p.exact
    h = 1e-4
    ut = (u(x, t + h) - u(x, t - h)) / (2 * h)
    ux = (u(x + h, t) - u(x - h, t)) / (2 * h)
    uxx = (u(x + h, t) - 2 * u(x, t) + u(x - h, t)) / h**2
    res = ut + p.eta * u(x, t) * ux - p.xi * uxx
    assert abs(res) <= 1e-5 * max(1.0, abs(ut))
    assert u(0.0, t) == 0 and abs(u(1.0, t)) < 1e-15


def test_periodic_settings():
    for name, (xi, zeta) in {"periodic_kdv": (0, 1), "periodic_burgers": (1, 0),
                             "periodic_kdv_burgers": (1e-4, 1e-5)}.items():
        pre = make_builtin(name)
        p = pre.problem
        assert (p.alpha, p.eta, p.a, p.b) == (0.2, 0.05, -1.0, 1.0)
        assert (p.xi, p.zeta) == (xi, zeta)
        assert len(p.boundary) == p.required_bcs()
        assert pre.probes == PROBES and pre.period == pytest.approx(0.1)
    assert PROBES == (-0.950670, -0.808460, -0.587280, -0.308720, 0.0, 0.999650)
    t = np.array(periodic_times())
    assert t[0] == 0.05 and t[-1] == pytest.approx(1.8)
    assert np.allclose(np.diff(t), FORCING_PERIOD / 40)


def test_overrides():
    pre = make_builtin("problem1", alpha=0.75, N=41, n_x=7, M=45, contour="parabolic")
    assert (pre.problem.alpha, pre.N, pre.n_x, pre.M, pre.contour) == (0.75, 41, 7, 45, "parabolic")
    assert make_builtin("problem2", domain=(0.0, 2.0)).problem.b == 2.0
    with pytest.raises(ValueError):
        make_builtin("problem4")
    with pytest.raises(ValueError):
        make_builtin("problem1", colour="red")
    with pytest.raises(ValueError):
        make_builtin("problem1", xi=0.5)
    with pytest.raises(ValueError):
        make_builtin("problem1", N=5, n_x=7)
    assert set(BUILTINS) == {"problem1", "problem2", "problem3", "periodic_kdv", "periodic_burgers",
                             "periodic_kdv_burgers"}


def test_manufactured_power_positive():
    with pytest.raises(ValueError):
        ManufacturedSolution(np.sin, np.cos, np.sin, np.cos, 0.0)
