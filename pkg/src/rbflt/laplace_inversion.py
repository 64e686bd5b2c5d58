"""Trapezoidal quadrature of the Bromwich integral on parabolic and hyperbolic contours.

Only nodes with ``j >= 0`` are generated. The negative half follows from
``s(-zeta) = conj(s(zeta))``, valid for transforms of real signals.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

import numpy as np
from scipy.special import gamma

KINDS = ("parabolic", "hyperbolic")


class ContourWindowWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ContourSpec:
    kind: str
    M: int
    h: float
    v: float
    t0: float
    T: float
    kappa: float = 0.0
    omega: float = 0.0
    angle: float = math.pi / 4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if not (self.h > 0 and self.v > 0):
            raise ValueError("step h and scale v must be positive")
        if not (self.t0 > 0 and self.T >= self.t0):
            raise ValueError(f"invalid time window [{self.t0}, {self.T}]")
        if self.kind == "hyperbolic":
            if self.omega < 0:
                raise ValueError("hyperbolic shift omega must be >= 0")
            if not 0 < self.angle < math.pi / 2:
                raise ValueError("hyperbolic angle must lie in (0, pi/2)")
        elif not math.isfinite(self.kappa) or self.kappa >= 1:
            # kappa >= 1 folds the parabola onto or past the real axis
            raise ValueError("parabolic kappa must be finite and < 1")


class QuadNode(NamedTuple):
    index: int
    point: complex
    weight: complex


def contour_path(spec: ContourSpec, zeta):
    """(s(zeta), ds/dzeta) for real ``zeta``."""
    z = np.asarray(zeta, dtype=float)
    if spec.kind == "parabolic":
        q = 1.0 - spec.kappa
        s = spec.v * (q * q - z * z) + 2j * spec.v * z * q
        ds = 2.0 * spec.v * (-z + 1j * q)
    else:
        arg = spec.angle - 1j * z
        s = spec.omega + spec.v * (1.0 - np.sin(arg))
        ds = 1j * spec.v * np.cos(arg)
    return s, ds


def contour_arrays(spec: ContourSpec):
    return contour_path(spec, spec.h * np.arange(spec.M + 1))


def build_contour(spec: ContourSpec) -> list[QuadNode]:
    s, w = contour_arrays(spec)
    return [QuadNode(j, complex(s[j]), complex(w[j])) for j in range(spec.M + 1)]


def _terms(samples, spec: ContourSpec, t: float):
    s, w = contour_arrays(spec)
    samples = np.asarray(samples)
    if samples.shape[0] != spec.M + 1:
        raise ValueError(f"expected {spec.M + 1} samples, got {samples.shape[0]}")
    if not np.all(np.isfinite(samples)):
        raise ValueError("transform samples must be finite")
    if t <= 0:
        raise ValueError(f"inversion time must be positive, got {t}")
    if not spec.t0 * (1 - 1e-12) <= t <= spec.T * (1 + 1e-12):
        warnings.warn(
            f"t={t} outside contour window [{spec.t0}, {spec.T}]; accuracy degrades",
            ContourWindowWarning,
            stacklevel=3,
        )
    growth = (s * t).real
    if np.any(growth > 700.0):
        j = int(np.argmax(growth > 700.0))
        raise OverflowError(f"exp(s_j t) overflows at node j={j} (Re s_j t = {growth[j]:.1f})")
    factor = np.exp(s * t) * w
    return factor.reshape((-1,) + (1,) * (samples.ndim - 1)) * samples


def invert(samples, spec: ContourSpec, t: float):
    """u(t) from transform samples at the j >= 0 contour nodes.

    ``samples`` has shape (M+1, ...); trailing axes are inverted independently.
    """
    T = _terms(samples, spec, t)
    total = 0.5 * T[0].imag
    for j in range(1, spec.M + 1):  # fixed order keeps results bit-reproducible
        total = total + T[j].imag
    return spec.h / math.pi * total


def imag_leakage(samples, spec: ContourSpec, t: float):
    """|imaginary part| the full two-sided sum would carry, given the reduced samples.

    Under exact conjugate symmetry only the j=0 term can contribute, through
    Im u(s_0) at the real-axis node.
    """
    T = _terms(samples, spec, t)
    return spec.h / (2 * math.pi) * np.abs(T[0].real)


def invert_full(transform, spec: ContourSpec, t: float) -> complex:
    """Two-sided sum over j=-M..M evaluating ``transform`` on both halves; complex result."""
    z = spec.h * np.arange(-spec.M, spec.M + 1)
    s, w = contour_path(spec, z)
    vals = np.array([transform(sj) for sj in s])
    return complex(spec.h / (2j * math.pi) * np.sum(np.exp(s * t) * vals * w))


def error_estimate(c: float, M: int) -> float:
    """exp(-c M / ln M)."""
    if M < 2:
        raise ValueError(f"error estimate needs M >= 2, got {M}")
    return math.exp(-c * M / math.log(M))


# -- calibration -----------------------------------------------------------

def transform_pair_suite():
    """(name, F(s), f(t)) pairs used to calibrate and self-test contours."""
    pairs = [
        ("1/s", lambda s: 1.0 / s, lambda t: np.ones_like(t)),
        ("1/s^2", lambda s: 1.0 / s ** 2, lambda t: t),
    ]
    for a in (0.25, 0.5, 0.9):
        pairs.append((f"t^{a}", lambda s, a=a: gamma(a + 1) / s ** (a + 1), lambda t, a=a: t ** a))
    pairs.append(("exp(-t)", lambda s: 1.0 / (s + 1.0), lambda t: np.exp(-t)))
    return pairs


def monomial_pairs(powers=(2, 5, 10)):
    """Higher-order poles at s = 0, as produced by manufactured forcings."""
    return [(f"t^{p}", lambda s, p=p: gamma(p + 1) / s ** (p + 1), lambda t, p=p: t ** p) for p in powers]


def oscillatory_pair(omega: float, a: float):
    """sin(omega t) tanh(a t), scored against its maximum rather than pointwise."""
    from .transform_data import sine_tanh_closed_form

    return (
        "sin*tanh",
        lambda s: sine_tanh_closed_form(omega, a, s),
        lambda t: np.sin(omega * t) * np.tanh(a * t),
        "uniform",
    )


SUITES = ("transform-pairs", "manufactured")


def calibration_pairs(oscillation=None, suite="manufactured"):
    """Pairs a contour is calibrated on.

    ``"transform-pairs"`` is the self-test suite alone; ``"manufactured"``
    adds the higher monomials that manufactured forcings produce.
    ``oscillation=(omega, a)`` adds the driven sin*tanh pair to either.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown calibration suite {suite!r}; expected one of {SUITES}")
    pairs = transform_pair_suite()
    if suite == "manufactured":
        pairs += monomial_pairs()
    if oscillation is not None:
        pairs.append(oscillatory_pair(*oscillation))
    return pairs


def suite_error(spec: ContourSpec, n_times: int = 20, pairs=None, times=None) -> float:
    """Max relative error of a pair suite over ``n_times`` geometric times in the window.

    Pairs carrying a fourth entry ``"uniform"`` are scored relative to their
    largest magnitude over the sample times instead of pointwise.
    """
    pairs = transform_pair_suite() if pairs is None else pairs
    if times is None:
        times = np.geomspace(spec.t0, spec.T, n_times)
        if any(len(p) > 3 for p in pairs):
            # oscillatory pairs need the window resolved uniformly
            times = np.union1d(times, np.linspace(spec.t0, spec.T, 10 * n_times))
    s, w = contour_arrays(spec)
    with np.errstate(over="ignore", invalid="ignore"):
        E = np.exp(np.outer(times, s)) * w
    worst = 0.0
    weights = np.r_[0.5, np.ones(spec.M)]
    for pair in pairs:
        F, f = pair[1], pair[2]
        with np.errstate(over="ignore", invalid="ignore"):
            approx = spec.h / math.pi * (E * F(s)).imag @ weights
        exact = f(times)
        scale = np.max(np.abs(exact)) if len(pair) > 3 and pair[3] == "uniform" else np.abs(exact)
        err = np.max(np.abs(approx - exact) / scale)
        if not np.isfinite(err):
            return math.inf
        worst = max(worst, err)
    return worst


def calibrate(kind: str, t0: float, T: float, M: int, pairs=None, angles=None) -> tuple[ContourSpec, float]:
    """Grid search over (v, h) [and the hyperbolic angle] minimising :func:`suite_error`.

    Returns the best spec and its suite error.
    """
    pairs = calibration_pairs() if pairs is None else pairs
    if angles is None:
        angles = (math.pi / 4,) if kind == "parabolic" else np.linspace(0.1, 1.4, 14)
    best, best_err = None, math.inf
    # scale v with M/T and h with 1/M so the same grids serve every window
    v_grid = np.geomspace(0.02, 2.0, 41) * M / T
    h_grid = np.geomspace(0.5, 30.0, 41) / M
    for angle in angles:
        for v in v_grid:
            for h in h_grid:
                spec = ContourSpec(kind, M, float(h), float(v), t0, T, angle=float(angle))
                err = suite_error(spec, pairs=pairs)
                if err < best_err:
                    best, best_err = spec, err
    # local refinement around the coarse optimum
    step_v, step_h, step_a = 10 ** (2 / 40), 10 ** (math.log10(60) / 40), 0.05
    for _ in range(3):
        cand = []
        for fv in np.linspace(1 / step_v, step_v, 7):
            for fh in np.linspace(1 / step_h, step_h, 7):
                for da in ((0.0,) if kind == "parabolic" else np.linspace(-step_a, step_a, 5)):
                    a = min(max(best.angle + da, 1e-3), math.pi / 2 - 1e-3)
                    cand.append(replace(best, v=best.v * fv, h=best.h * fh, angle=a))
        for spec in cand:
            err = suite_error(spec, pairs=pairs)
            if err < best_err:
                best, best_err = spec, err
        step_v, step_h, step_a = step_v ** 0.5, step_h ** 0.5, step_a / 2
    return best, best_err


# -- presets ---------------------------------------------------------------

def _key(kind, t0, T, M, suite="transform-pairs", oscillation=None):
    key = f"{kind}:{float(t0)!r}:{float(T)!r}:{int(M)}:{suite}"
    if oscillation is not None:
        key += ":osc={!r},{!r}".format(*map(float, oscillation))
    return key


@lru_cache(maxsize=None)
def load_presets() -> dict:
    text = resources.files("rbflt").joinpath("contour_presets.json").read_text()
    return {_key(p["kind"], p["t0"], p["T"], p["M"], p["suite"], p.get("oscillation")): p
            for p in json.loads(text)}


def preset_contour(kind: str, t0: float, T: float, M: int, suite: str = "transform-pairs",
                   oscillation=None) -> ContourSpec:
    """Stored calibrated contour for (kind, t0, T, M, suite); calibrates on the fly when absent.

    ``suite`` names the pairs the contour was tuned on (see
    :func:`calibration_pairs`); ``oscillation=(omega, a)`` selects contours
    tuned with the driven sin*tanh pair included.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown calibration suite {suite!r}; expected one of {SUITES}")
    osc = None if oscillation is None else tuple(map(float, oscillation))
    p = load_presets().get(_key(kind, t0, T, M, suite, osc))
    if p is None:
        return _calibrated(kind, float(t0), float(T), int(M), suite, osc)
    fields = {k: p[k] for k in ("kind", "M", "h", "v", "t0", "T", "kappa", "omega", "angle") if k in p}
    return ContourSpec(**fields)


def calibration_angles(kind, oscillation=None):
    """Hyperbolic angles searched; enclosing forcing poles wants a shallow hyperbola."""
    if kind == "parabolic":
        return None
    return np.linspace(0.05, 0.3, 6) if oscillation is not None else None


@lru_cache(maxsize=None)
def _calibrated(kind, t0, T, M, suite="transform-pairs", oscillation=None):
    pairs = calibration_pairs(oscillation, suite)
    return calibrate(kind, t0, T, M, pairs=pairs, angles=calibration_angles(kind, oscillation))[0]


def spec_to_dict(spec: ContourSpec) -> dict:
    return asdict(spec)
