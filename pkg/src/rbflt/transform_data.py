"""Laplace-domain data: Caputo symbol, monomial pairs, sin*tanh boundary signal."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma, psi

SERIES_TOL = 1e-14
SERIES_CAP = 100_000


def caputo_symbol(alpha: float, s):
    """(s^alpha, s^(alpha-1)) on the principal branch."""
    if not 0 < alpha <= 1:
        raise ValueError(f"fractional order must lie in (0, 1], got {alpha}")
    s = np.asarray(s, dtype=complex)
    if np.any(s == 0):
        raise ValueError("Caputo symbol is singular at s = 0")
    lhs = s ** alpha
    return lhs, lhs / s


def monomial_transform(p: float, s):
    """Laplace transform of t^p: Gamma(p+1) / s^(p+1)."""
    if p <= -1:
        raise ValueError(f"t^p has no Laplace transform for p <= -1 (p={p})")
    s = np.asarray(s, dtype=complex)
    out = gamma(p + 1.0) / s ** (p + 1.0)
    return out[()] if out.ndim == 0 else out


def sine_tanh_transform(omega: float, a: float, s, tol: float = SERIES_TOL, max_terms: int = SERIES_CAP):
    """Transform of sin(omega t) tanh(a t) via tanh(at) = 1 + 2 sum_k (-1)^k exp(-2akt).

    The partial-fraction series converges for every s off the poles
    ``-2ak +- i omega``, so it also serves as the continuation left of
    Re s = -2a that deformed contours need. Terms decay like k^-2; partial
    sums are averaged pairwise (first Euler step) and summation stops once
    the averaged sum changes by less than ``tol`` relative, checked only past
    the poles nearest ``s``. ``max_terms=0`` returns the pure-sine transform.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    s_arr = np.asarray(s, dtype=complex)
    flat = s_arr.ravel()
    k_near = np.rint(-flat.real / (2 * a))
    shifted = flat + 2 * a * np.maximum(k_near, 0)
    pole_gap = np.minimum(np.abs(shifted - 1j * omega), np.abs(shifted + 1j * omega))
    if np.any(pole_gap < 1e-12 * max(1.0, omega)):
        raise ValueError("transform evaluated at a pole -2ak +- i*omega")
    w2 = omega * omega
    base = omega / (flat * flat + w2)
    out = base.copy()
    chunk = 2048
    for idx, sv in enumerate(flat):
        partial, k0 = base[idx], 1
        k_check = max(1, int(k_near[idx]) + 2)
        while k0 <= max_terms:
            k = np.arange(k0, min(k0 + chunk, max_terms + 1))
            sk = sv + 2.0 * a * k
            terms = 2.0 * np.where(k % 2 == 0, 1.0, -1.0) * omega / (sk * sk + w2)
            sums = partial + np.cumsum(terms)
            averaged = sums - 0.5 * terms
            delta = 0.5 * np.abs(terms + np.r_[terms[1:], np.nan])
            hit = np.nonzero((delta < tol * np.abs(averaged)) & (k >= k_check))[0]
            if hit.size:
                out[idx] = averaged[hit[0]]
                break
            partial, k0 = sums[-1], k[-1] + 1
            out[idx] = sums[-1] - 0.5 * terms[-1]
    out = out.reshape(s_arr.shape)
    return out[()] if out.ndim == 0 else out


def sine_tanh_closed_form(omega: float, a: float, s):
    """Same transform summed exactly with digamma functions.

    sum_{k>=0} (-1)^k / (k + z) = (psi((z+1)/2) - psi(z/2)) / 2, applied to the
    partial fractions of omega / ((s + 2ak)^2 + omega^2).
    """
    s = np.asarray(s, dtype=complex)

    def alt(z):
        return 0.5 * (psi((z + 1) / 2) - psi(z / 2)) - 1.0 / z

    zm = (s - 1j * omega) / (2 * a)
    zp = (s + 1j * omega) / (2 * a)
    out = omega / (s * s + omega * omega) + (alt(zm) - alt(zp)) / (2j * a)
    return out[()] if out.ndim == 0 else out


def sine_tanh_poles(omega: float, a: float, k_max: int):
    """Poles -2ak + i*omega (k = 0..k_max) in the upper half plane with their residues."""
    k = np.arange(k_max + 1)
    poles = -2.0 * a * k + 1j * omega
    residues = np.where(k == 0, 1.0, 2.0 * (-1.0) ** k) / 2j
    return poles, residues


@dataclass
class SeparableTransform:
    """f(x_i, s) = sum_k A_k(x_i) T_k(s)."""

    terms: list[tuple[np.ndarray, Callable]] = field(default_factory=list)

    def __call__(self, s) -> np.ndarray:
        """Values at every node for scalar ``s``; shape (n_nodes,)."""
        if not self.terms:
            raise ValueError("empty transform has no node count; use evaluate(s, n)")
        return self.evaluate(s, len(self.terms[0][0]))

    def evaluate(self, s, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=complex)
        for profile, factor in self.terms:
            out += np.asarray(profile, dtype=float) * complex(factor(s))
        return out

    def evaluate_many(self, s: Sequence[complex], n: int) -> np.ndarray:
        """Shape (len(s), n)."""
        s = np.asarray(s, dtype=complex)
        out = np.zeros((len(s), n), dtype=complex)
        for profile, factor in self.terms:
            out += np.outer(np.asarray(factor(s), dtype=complex), np.asarray(profile, dtype=float))
        return out

    def scaled(self, c: float) -> "SeparableTransform":
        return SeparableTransform([(c * np.asarray(p, dtype=float), f) for p, f in self.terms])

    def __bool__(self):
        return bool(self.terms)


def zero_transform(s):
    return np.zeros_like(np.asarray(s, dtype=complex))
