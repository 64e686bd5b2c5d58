"""Radial kernels and their closed-form x-derivatives up to third order."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("multiquadric", "inverse-multiquadric", "gaussian")
MAX_ORDER = 3


@dataclass(frozen=True)
class Kernel:
    """A radial function family with shape parameter ``shape`` (inverse length)."""

    family: str = "multiquadric"
    shape: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        if not math.isfinite(self.shape) or self.shape <= 0:
            raise ValueError(f"shape parameter must be finite and positive, got {self.shape}")

    def with_shape(self, shape: float) -> "Kernel":
        return Kernel(self.family, float(shape))


def kernel_value(k: Kernel, r):
    """phi(|r|) for scalar or array ``r``."""
    return kernel_derivative(k, r, 0)


def kernel_derivative(k: Kernel, dx, order: int):
    """d^m/dx^m phi(|x - x_j|) evaluated at displacement ``dx = x - x_j``.

    Works elementwise on arrays. Every family here is a smooth even function
    of the displacement, so the derivative is taken with respect to ``dx``
    directly.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"derivative order must be in 0..{MAX_ORDER}, got {order}")
    u = np.asarray(dx, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("displacement must be finite")
    e2 = k.shape * k.shape
    if k.family == "gaussian":
        g = np.exp(-e2 * u * u)
        if order == 0:
            out = g
        elif order == 1:
            out = -2.0 * e2 * u * g
        elif order == 2:
            out = (4.0 * e2 * e2 * u * u - 2.0 * e2) * g
        else:
            out = (12.0 * e2 * e2 * u - 8.0 * e2 * e2 * e2 * u ** 3) * g
        return out[()] if out.ndim == 0 else out

    q = 1.0 + e2 * u * u
    phi = np.sqrt(q)
    if k.family == "multiquadric":
        if order == 0:
            out = phi
        elif order == 1:
            out = e2 * u / phi
        elif order == 2:
            out = e2 / (q * phi)
        else:
            out = -3.0 * e2 * e2 * u / (q * q * phi)
    else:
        if order == 0:
            out = 1.0 / phi
        elif order == 1:
            out = -e2 * u / (q * phi)
        elif order == 2:
            out = e2 * (2.0 * e2 * u * u - 1.0) / (q * q * phi)
        else:
            out = 3.0 * e2 * e2 * u * (3.0 - 2.0 * e2 * u * u) / (q * q * q * phi)
    return out[()] if out.ndim == 0 else out
