"""Mesh-free RBF-FD discretisation with Laplace-transform time integration
for time-fractional KdV, Burgers and KdV-Burgers equations."""

__version__ = "0.1.0"

from .kernels import Kernel, kernel_derivative, kernel_value
from .geometry import NodeSet, Stencil, build_nodes, build_stencils
from .diffmat import ShapeRule, global_diff_matrix, local_diff_matrix
from .laplace_inversion import ContourSpec, build_contour, error_estimate, invert, preset_contour
from .solver import BoundaryCondition, Discretization, ProblemSpec, SolveResult, picard_solve, solve_time_grid
from .problems import make_builtin
from .metrics import error_norms, periodicity_report

__all__ = [
    "Kernel", "kernel_derivative", "kernel_value",
    "NodeSet", "Stencil", "build_nodes", "build_stencils",
    "ShapeRule", "global_diff_matrix", "local_diff_matrix",
    "ContourSpec", "build_contour", "error_estimate", "invert", "preset_contour",
    "BoundaryCondition", "Discretization", "ProblemSpec", "SolveResult", "picard_solve", "solve_time_grid",
    "make_builtin", "error_norms", "periodicity_report",
]
