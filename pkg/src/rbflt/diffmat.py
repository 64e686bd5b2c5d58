"""RBF differentiation matrices: global (dense) and local RBF-FD (sparse).

Shape parameter handling: pass a :class:`Kernel` to use its fixed shape, a
:class:`ShapeRule`, or a bare family name (``"multiquadric"``, ...) for the
default rule ``eps = 1 / (2 * half_width)``. ``half_width`` is the largest
distance from the evaluation centre to a member of its point set.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.linalg.lapack import dgecon

from .geometry import NodeSet, Stencil, build_stencils, nearest_indices
from .kernels import Kernel, kernel_derivative, kernel_value

COND_LIMIT = 1e14


class IllConditionedWarning(RuntimeWarning):
    pass


class SingularStencilError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ShapeRule:
    """Per-point-set shape parameter ``eps = factor / half_width``."""

    family: str = "multiquadric"
    factor: float = 0.5

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError(f"shape factor must be positive, got {self.factor}")
        Kernel(self.family)  # validates the family name


def resolve_kernel(kernel, half_width: float) -> Kernel:
    if isinstance(kernel, Kernel):
        return kernel
    rule = ShapeRule(kernel) if isinstance(kernel, str) else kernel
    if half_width <= 0:
        raise ValueError("cannot apply the shape rule to a zero-width point set")
    return Kernel(rule.family, rule.factor / half_width)


def interpolation_matrix(points, k: Kernel) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if len(np.unique(x)) != len(x):
        raise ValueError("interpolation points must be distinct")
    return kernel_value(k, x[:, None] - x[None, :])


def _factor(K: np.ndarray, label: str):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(K, check_finite=True)
    except (sla.LinAlgWarning, ValueError, np.linalg.LinAlgError) as exc:
        raise SingularStencilError(f"{label}: interpolation matrix is singular ({exc})") from exc
    if np.any(np.diag(lu) == 0.0):
        raise SingularStencilError(f"{label}: interpolation matrix is singular")
    rcond, info = dgecon(lu, np.linalg.norm(K, 1), norm="1")
    if info == 0 and rcond * COND_LIMIT < 1.0:
        warnings.warn(
            f"{label}: interpolation matrix condition estimate {1.0 / max(rcond, 1e-300):.2e} exceeds {COND_LIMIT:.0e}",
            IllConditionedWarning,
            stacklevel=3,
        )
    return lu, piv


def _operator_row(k: Kernel, x_eval: float, pts: np.ndarray, order: int) -> np.ndarray:
    return kernel_derivative(k, x_eval - pts, order)


def stencil_weights(points, x_eval: float, kernel, order: int, label: str = "stencil") -> np.ndarray:
    """Weights w with sum_j w_j u(points_j) ~ u^(order)(x_eval).

    ``order=0`` gives interpolation weights (identity operator at a node).
    """
    pts = np.asarray(points, dtype=float)
    k = resolve_kernel(kernel, float(np.max(np.abs(pts - x_eval))))
    K = interpolation_matrix(pts, k)
    lu, piv = _factor(K, label)
    # K is symmetric, so K^T w = b is the same solve as K w = b
    return sla.lu_solve((lu, piv), _operator_row(k, x_eval, pts, order))


def global_diff_matrix(nodes: NodeSet, kernel, order: int) -> np.ndarray:
    """Dense L = K_L K^{-1}; ``order=0`` is the identity-operator hook."""
    x = nodes.coords
    k = resolve_kernel(kernel, 0.5 * (nodes.b - nodes.a))
    K = interpolation_matrix(x, k)
    lu, piv = _factor(K, "global")
    B = kernel_derivative(k, x[:, None] - x[None, :], order)
    # row i of L solves K^T w_i = b_i; K is symmetric, so L^T = K^{-1} B^T, the
    # same triangular solves the local weights use
    return sla.lu_solve((lu, piv), B.T).T


def local_diff_matrix(nodes: NodeSet, stencils: list[Stencil], kernel, order: int) -> sp.csr_matrix:
    """Sparse L^FD with row i supported exactly on stencil i."""
    x = nodes.coords
    n = nodes.n
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices, data = [], []
    for st in sorted(stencils, key=lambda s: s.center):
        w = stencil_weights(x[st.members], x[st.center], kernel, order, label=f"stencil {st.center}")
        indices.append(st.members)
        data.append(w)
        indptr[st.center + 1] = len(st.members)
    if len(stencils) != n:
        raise ValueError(f"need one stencil per node, got {len(stencils)} for {n} nodes")
    indptr = np.cumsum(indptr)
    # explicit zeros are kept so the pattern equals the stencil member set
    mat = sp.csr_matrix((np.concatenate(data), np.concatenate(indices), indptr), shape=(n, n))
    return mat


def boundary_row(nodes: NodeSet, kernel, bc: str, side: str, n_x: int = 5) -> sp.csr_matrix:
    """1 x N boundary-operator row: unit row for Dirichlet, one-sided d/dx row for Neumann."""
    i = nodes.index_of(side)
    n = nodes.n
    if bc == "dirichlet":
        return sp.csr_matrix(([1.0], ([0], [i])), shape=(1, n))
    if bc != "neumann":
        raise ValueError(f"unknown boundary condition {bc!r}")
    members = nearest_indices(nodes.coords, nodes.coords[i], min(n_x, n))
    w = stencil_weights(nodes.coords[members], nodes.coords[i], kernel, 1, label=f"boundary stencil {i}")
    return sp.csr_matrix((w, (np.zeros(len(members), dtype=int), members)), shape=(1, n))


def point_weights(nodes: NodeSet, x_eval: float, kernel, order: int = 0, n_x: int = 5):
    """(members, weights) evaluating the local interpolant (or a derivative) at an arbitrary point."""
    members = nearest_indices(nodes.coords, x_eval, min(n_x, nodes.n))
    w = stencil_weights(nodes.coords[members], x_eval, kernel, order, label=f"point {x_eval:g}")
    return members, w


def dump_csv(matrix, path) -> None:
    """Write any dense or sparse matrix as (row, col, value) triples."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "value"])
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            w.writerow([int(r), int(c), f"{v:.16e}"])


def diff_matrices(nodes: NodeSet, n_x: int, kernel="multiquadric", orders=(1, 2, 3)) -> dict:
    """Local matrices for several orders sharing one stencil set."""
    stencils = build_stencils(nodes, n_x)
    return {m: local_diff_matrix(nodes, stencils, kernel, m) for m in orders}
