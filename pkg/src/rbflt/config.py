"""Flat ``key = value`` run configuration.

One setting per line, ``#`` starts a comment.  Recognised keys:

==============  ====================================================
problem         built-in id (problem1 ... periodic_kdv_burgers)
alpha, xi, eta  equation coefficients (preset defaults otherwise)
N, n_x, M       node count, stencil size, contour nodes
contour         ``hyperbolic`` or ``parabolic``
window          ``t0, T`` of the contour
times           comma separated output times
shape_factor    epsilon * stencil half-width of the multiquadric
freeze          fraction of t at which the advection coefficient is frozen
tol             Picard tolerance
domain          ``a, b``
contour_h, contour_v, contour_angle, contour_kappa, contour_omega
                explicit contour; skips the calibrated preset
probes          comma separated probe positions (periodic presets have six)
max_linf        acceptance check on the final-time L_inf error
max_defect_ratio, max_edge_amplitude
                periodicity checks over ``periodicity_window``
periodicity_window   ``t_lo, t_hi`` (default 1.4, 1.8)
dump_matrices   ``true`` writes D1/D2/D3 as row,col,value CSV
threads         worker threads for the Laplace-space solves
==============  ====================================================
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields

from .problems import BUILTINS, KNOBS

_FLOAT = {"alpha", "xi", "eta", "shape_factor", "freeze", "tol", "contour_h", "contour_v",
          "contour_angle", "contour_kappa", "contour_omega", "max_linf", "max_defect_ratio",
          "max_edge_amplitude"}
_INT = {"N", "n_x", "M", "threads"}
_TUPLE = {"window", "times", "domain", "probes", "periodicity_window"}
_STR = {"problem", "contour", "out"}
_BOOL = {"dump_matrices"}
KEYS = _FLOAT | _INT | _TUPLE | _STR | _BOOL


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def coerce(key: str, text: str):
    if key not in KEYS:
        raise ValueError(f"unknown config key {key!r}")
    text = text.strip()
    try:
        if key in _FLOAT:
            return float(text)
        if key in _INT:
            val = float(text)
            if val != int(val):
                raise ValueError
            return int(val)
        if key in _TUPLE:
            return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())
        if key in _BOOL:
            return _bool(text)
    except ValueError:
        raise ValueError(f"bad value for {key}: {text!r}") from None
    return text


def parse_pairs(items) -> dict:
    """``["key=value", ...]`` into a typed dict."""
    out = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = coerce(k.strip(), v)
    return out


def read_config(path) -> dict:
    items = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            items.append(line)
    return parse_pairs(items)


@dataclass
class RunConfig:
    problem: str
    overrides: dict = field(default_factory=dict)
    contour_params: dict = field(default_factory=dict)
    probes: tuple | None = None
    checks: dict = field(default_factory=dict)
    periodicity_window: tuple = (1.4, 1.8)
    dump_matrices: bool = False
    threads: int = 1
    out: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "problem" not in d:
            raise ValueError("config needs a 'problem' key")
        problem = d.pop("problem")
        if problem not in BUILTINS:
            raise ValueError(f"unknown problem {problem!r}; expected one of {BUILTINS}")
        cfg = cls(problem)
        for k in list(d):
            if k in KNOBS:
                cfg.overrides[k] = d.pop(k)
            elif k.startswith("contour_"):
                cfg.contour_params[k[len("contour_"):]] = d.pop(k)
            elif k.startswith("max_"):
                cfg.checks[k] = d.pop(k)
        names = {f.name for f in fields(cls)}
        for k, v in d.items():
            if k not in names:
                raise ValueError(f"key {k!r} is not a run setting")
            setattr(cfg, k, v)
        if cfg.contour_params and not {"h", "v"} <= set(cfg.contour_params):
            raise ValueError("explicit contours need at least contour_h and contour_v")
        return cfg
