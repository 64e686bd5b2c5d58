"""Glue between presets and the solver: resolve contour and discretisation, then solve."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffmat import ShapeRule
from .laplace_inversion import ContourSpec, preset_contour
from .problems import Preset
from .solver import Discretization, SolveResult, probe_matrix, solve_time_grid


@dataclass
class Experiment:
    preset: Preset
    disc: Discretization
    contour: ContourSpec
    result: SolveResult

    def probe_traces(self) -> np.ndarray:
        """(len(probes), len(times)) values at the preset's probe positions."""
        if not self.preset.probes:
            return np.zeros((0, len(self.result.times)))
        P = probe_matrix(self.disc, self.preset.probes)
        return np.asarray(P @ self.result.solution)

    def exact(self) -> np.ndarray | None:
        """Exact solution on the nodes at every output time, when known."""
        ex = self.preset.problem.exact
        if ex is None:
            return None
        x = self.disc.nodes.coords
        return np.column_stack([ex(x, t) for t in self.result.times])


def resolve(pre: Preset, contour: ContourSpec | None = None):
    """Build the discretisation and contour a preset asks for."""
    p = pre.problem
    need_third = p.zeta != 0
    disc = Discretization.build(p.a, p.b, pre.N, pre.n_x, ShapeRule("multiquadric", pre.shape_factor), need_third)
    if contour is None:
        t0, T = pre.window
        contour = preset_contour(pre.contour, t0, T, pre.M, pre.suite, pre.oscillation)
    return disc, contour


def run_preset(pre: Preset, threads: int = 1, contour: ContourSpec | None = None, max_iter: int = 50) -> Experiment:
    disc, contour = resolve(pre, contour)
    res = solve_time_grid(pre.problem, disc, contour, pre.times, pre.tol, max_iter, threads, pre.freeze)
    return Experiment(pre, disc, contour, res)
