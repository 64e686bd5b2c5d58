"""Laplace-space RBF-FD collocation with an outer Picard loop.

Each Picard step freezes the advection coefficient at the target time,
``c(x) = u^{n-1}(x, t)``, so that every step is a constant-coefficient
problem in Laplace space:

    [s^a I + eta diag(c) D1 - xi D2 + zeta D3] u(s) = s^(a-1) u0 + f(s)

solved at the contour nodes and inverted back to time ``t``.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .diffmat import boundary_row, local_diff_matrix, point_weights
from .geometry import LEFT, RIGHT, NodeSet, build_nodes, build_stencils
from .laplace_inversion import ContourSpec, contour_arrays, imag_leakage, invert
from .transform_data import SeparableTransform, caputo_symbol

RESIDUAL_RTOL = 1e-10
DIVERGENCE_LIMIT = 1e6
DENSE_MAX_N = 256


class PicardConvergenceError(RuntimeError):
    pass


class PicardDivergenceError(RuntimeError):
    pass


class LinearSolveError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class BoundaryCondition:
    """``kind`` is ``"dirichlet"`` or ``"neumann"``; ``data`` maps s (array) to g(s)."""

    side: str
    kind: str
    data: Callable | None = None

    def values(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        if self.data is None:
            return np.zeros_like(s)
        return np.asarray(self.data(s), dtype=complex) * np.ones_like(s)


@dataclass
class ProblemSpec:
    """Time-fractional KdV-Burgers problem

        D_t^alpha u + eta u u_x - xi u_xx + zeta u_xxx = f   on [a, b]

    ``u0`` is a callable of x; ``forcing`` a list of ``(profile(x), factor(s))``
    pairs whose products sum to the transformed source.
    """

    alpha: float
    eta: float
    xi: float
    zeta: float
    a: float
    b: float
    u0: Callable = None
    forcing: list = field(default_factory=list)
    boundary: list = field(default_factory=list)
    exact: Callable | None = None
    name: str = "custom"

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.a < self.b:
            raise ValueError(f"degenerate domain [{self.a}, {self.b}]")
        if self.u0 is None:
            self.u0 = lambda x: np.zeros_like(np.asarray(x, dtype=float))

    def required_bcs(self) -> int:
        return 2 if self.zeta == 0 else 3

    def check_boundary(self):
        if len(self.boundary) != self.required_bcs():
            raise ValueError(
                f"{self.name}: zeta={self.zeta} needs {self.required_bcs()} boundary conditions, "
                f"got {len(self.boundary)}"
            )

    def forcing_at(self, x) -> SeparableTransform:
        return SeparableTransform([(np.asarray(prof(x), dtype=float), fac) for prof, fac in self.forcing])


@dataclass
class Discretization:
    """Nodes, sparse derivative matrices and boundary rows for one node set."""

    nodes: NodeSet
    n_x: int
    D1: sp.csr_matrix
    D2: sp.csr_matrix
    D3: sp.csr_matrix | None
    kernel: object = "multiquadric"

    @classmethod
    def build(cls, a, b, N, n_x, kernel="multiquadric", need_third=True):
        nodes = build_nodes(a, b, N)
        stencils = build_stencils(nodes, n_x)
        mats = [local_diff_matrix(nodes, stencils, kernel, m) for m in (1, 2)]
        D3 = local_diff_matrix(nodes, stencils, kernel, 3) if need_third else None
        return cls(nodes, n_x, mats[0], mats[1], D3, kernel)

    @property
    def n(self):
        return self.nodes.n

    def boundary_placement(self, bcs: Sequence[BoundaryCondition]) -> list[tuple[int, sp.csr_matrix]]:
        """(row index, operator row) per condition.

        The first condition on a side takes the boundary node's own row; a
        second one on the same side takes the adjacent interior node's row.
        """
        used = {}
        out = []
        for bc in bcs:
            base = self.nodes.index_of(bc.side)
            step = 1 if bc.side == LEFT else -1
            row = base + step * used.get(bc.side, 0)
            used[bc.side] = used.get(bc.side, 0) + 1
            op = boundary_row(self.nodes, self.kernel, bc.kind, bc.side, self.n_x)
            out.append((row, op))
        rows = [r for r, _ in out]
        if len(set(rows)) != len(rows):
            raise ValueError("boundary conditions collide on the same collocation row")
        return out


@dataclass
class SolveResult:
    times: np.ndarray
    solution: np.ndarray  # (N, n_times)
    iterations: np.ndarray
    residuals: list  # per time: (iterations, M+1) linear residual norms
    imag_residue: np.ndarray
    nodes: np.ndarray


# -- linear algebra --------------------------------------------------------

def solve_linear(A, b, rtol: float = RESIDUAL_RTOL):
    """Direct solve with a backward-error check; returns (x, residual_inf_norm)."""
    b = np.asarray(b)
    if sp.issparse(A):
        A = A.tocsc()
        try:
            x = sp.linalg.splu(A.astype(np.result_type(A.dtype, b.dtype))).solve(b.astype(np.result_type(A.dtype, b.dtype)))
        except RuntimeError as exc:
            raise LinearSolveError(f"singular factorization: {exc}") from exc
        a_norm = sp.linalg.norm(A, np.inf)
    else:
        A = np.asarray(A)
        try:
            # exactly singular input trips scipy's rcond division; the check below reports it
            with warnings.catch_warnings(), np.errstate(divide="ignore", invalid="ignore"):
                warnings.simplefilter("error", sla.LinAlgWarning)
                x = sla.solve(A, b)
        except (np.linalg.LinAlgError, sla.LinAlgWarning) as exc:
            raise LinearSolveError(f"singular factorization: {exc}") from exc
        a_norm = np.linalg.norm(A, np.inf)
    if not np.all(np.isfinite(x)):
        raise LinearSolveError("factorization produced non-finite values")
    res = float(np.max(np.abs(A @ x - b)))
    bound = rtol * (a_norm * np.max(np.abs(x)) + np.max(np.abs(b)))
    if not np.isfinite(res) or res > bound:
        raise LinearSolveError(f"residual {res:.3e} exceeds bound {bound:.3e}")
    return x, res


class _BandedOperator:
    """s-dependent system A(s) = s^alpha P + B with B real, stored in LAPACK band form."""

    def __init__(self, B: sp.spmatrix, pde_rows: np.ndarray):
        B = sp.csr_matrix(B)
        n = B.shape[0]
        coo = B.tocoo()
        off = coo.col - coo.row
        self.lower = int(max(0, -off.min())) if off.size else 0
        self.upper = int(max(0, off.max())) if off.size else 0
        self.n = n
        self.B = B
        self.a_norm_base = sp.linalg.norm(B, np.inf)
        self.use_band = 2 * (self.lower + self.upper) + 1 < n or n > DENSE_MAX_N
        self.pde_rows = pde_rows
        if self.use_band:
            ab = np.zeros((self.lower + self.upper + 1, n))
            ab[self.upper + coo.row - coo.col, coo.col] = coo.data
            self.ab = ab
        else:
            self.dense = B.toarray()

    def solve(self, sa: complex, rhs: np.ndarray, rtol: float = RESIDUAL_RTOL):
        diag = np.zeros(self.n, dtype=complex)
        diag[self.pde_rows] = sa
        if self.use_band:
            ab = self.ab.astype(complex)
            ab[self.upper] += diag
            try:
                x = sla.solve_banded((self.lower, self.upper), ab, rhs, check_finite=False)
            except np.linalg.LinAlgError as exc:
                raise LinearSolveError(f"singular banded factorization at s^alpha={sa:.4g}") from exc
        else:
            A = self.dense.astype(complex)
            A[np.diag_indices(self.n)] += diag
            try:
                x = sla.solve(A, rhs, check_finite=False)
            except np.linalg.LinAlgError as exc:
                raise LinearSolveError(f"singular factorization at s^alpha={sa:.4g}") from exc
        r = self.B @ x + diag * x - rhs
        res = float(np.max(np.abs(r)))
        bound = rtol * ((self.a_norm_base + abs(sa)) * np.max(np.abs(x)) + np.max(np.abs(rhs)))
        if not np.isfinite(res) or res > bound:
            raise LinearSolveError(f"residual {res:.3e} exceeds bound {bound:.3e} at s^alpha={sa:.4g}")
        return x, res


# -- assembly ---------------------------------------------------------------

def _pde_rows(n: int, placements) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    for r, _ in placements:
        mask[r] = False
    return np.nonzero(mask)[0]


def spatial_operator(p: ProblemSpec, disc: Discretization, c, placements) -> sp.csr_matrix:
    """s-independent part: PDE rows eta c D1 - xi D2 + zeta D3, boundary rows replaced."""
    n = disc.n
    c = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise ValueError("advection coefficient must be finite")
    B = p.eta * sp.diags(c) @ disc.D1 - p.xi * disc.D2
    if p.zeta != 0:
        if disc.D3 is None:
            raise ValueError("third-derivative matrix required when zeta != 0")
        B = B + p.zeta * disc.D3
    B = sp.lil_matrix(B)
    for r, op in placements:
        B.rows[r] = list(op.indices)
        B.data[r] = list(op.data)
    return sp.csr_matrix(B)


def assemble_laplace_system(p: ProblemSpec, disc: Discretization, c, s: complex):
    """(A, b) of the collocation system at one Laplace frequency ``s``."""
    p.check_boundary()
    placements = disc.boundary_placement(p.boundary)
    B = spatial_operator(p, disc, c, placements)
    rows = _pde_rows(disc.n, placements)
    sa, sa1 = caputo_symbol(p.alpha, s)
    diag = np.zeros(disc.n, dtype=complex)
    diag[rows] = sa
    A = sp.csr_matrix(B + sp.diags(diag))
    b = _rhs(p, disc, np.array([s]), placements)[0]
    return A, b


def _rhs(p: ProblemSpec, disc: Discretization, s: np.ndarray, placements) -> np.ndarray:
    """Right-hand sides for all frequencies; shape (len(s), N)."""
    x = disc.nodes.coords
    n = disc.n
    _, sa1 = caputo_symbol(p.alpha, s)
    u0 = np.asarray(p.u0(x), dtype=float) * np.ones(n)
    b = np.outer(sa1, u0)
    if p.forcing:
        b = b + p.forcing_at(x).evaluate_many(s, n)
    for (r, _), bc in zip(placements, p.boundary):
        b[:, r] = bc.values(s)
    return b


# -- Picard / time grid ----------------------------------------------------

@dataclass
class _Prepared:
    p: ProblemSpec
    disc: Discretization
    contour: ContourSpec
    placements: list
    rows: np.ndarray
    s: np.ndarray
    sa: np.ndarray
    rhs: np.ndarray


def prepare(p: ProblemSpec, disc: Discretization, contour: ContourSpec) -> _Prepared:
    p.check_boundary()
    placements = disc.boundary_placement(p.boundary)
    rows = _pde_rows(disc.n, placements)
    s, _ = contour_arrays(contour)
    sa, _ = caputo_symbol(p.alpha, s)
    return _Prepared(p, disc, contour, placements, rows, s, sa, _rhs(p, disc, s, placements))


def laplace_samples(prep: _Prepared, c, threads: int = 1):
    """u(x_i, s_j) for every contour node; returns (samples (M+1, N), residuals (M+1,))."""
    op = _BandedOperator(spatial_operator(prep.p, prep.disc, c, prep.placements), prep.rows)
    idx = range(len(prep.s))

    def one(j):
        return op.solve(prep.sa[j], prep.rhs[j])

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            out = list(pool.map(one, idx))
    else:
        out = [one(j) for j in idx]
    samples = np.array([x for x, _ in out])
    residuals = np.array([r for _, r in out])
    return samples, residuals


def picard_solve(
    prep: _Prepared,
    t: float,
    tol: float = 1e-9,
    max_iter: int = 50,
    start=None,
    threads: int = 1,
    freeze: float = 1.0,
):
    """Fixed-point iteration on the frozen advection coefficient.

    The coefficient for step n is the previous iterate evaluated at
    ``freeze * t``. ``start`` seeds the first coefficient (default u0).
    Returns (u, iterations, residual history, imaginary leakage).
    """
    if not 0 < freeze <= 1:
        raise ValueError(f"freeze fraction must lie in (0, 1], got {freeze}")
    p = prep.p
    c = np.asarray(p.u0(prep.disc.nodes.coords), dtype=float) * np.ones(prep.disc.n) if start is None else start
    prev = None
    history = []
    for n in range(1, max_iter + 1):
        samples, res = laplace_samples(prep, c, threads)
        history.append(res)
        u = invert(samples, prep.contour, t)
        size = float(np.max(np.abs(u)))
        if not np.isfinite(size) or size > DIVERGENCE_LIMIT:
            raise PicardDivergenceError(f"{p.name}: Picard iterate {n} diverged at t={t} (|u|={size:.3e})")
        if prev is not None and np.max(np.abs(u - prev)) <= tol * (1.0 + size):
            return u, n, np.array(history), float(np.max(imag_leakage(samples, prep.contour, t)))
        prev = u
        c = u if freeze == 1 else invert(samples, prep.contour, freeze * t)
    raise PicardConvergenceError(f"{p.name}: Picard iteration did not converge in {max_iter} steps at t={t}")


def solve_time_grid(
    p: ProblemSpec,
    disc: Discretization,
    contour: ContourSpec,
    times,
    tol: float = 1e-9,
    max_iter: int = 50,
    threads: int = 1,
    freeze: float = 1.0,
) -> SolveResult:
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("output times must be sorted")
    prep = prepare(p, disc, contour)
    n = disc.n
    sol = np.zeros((n, len(times)))
    iters = np.zeros(len(times), dtype=int)
    leaks = np.zeros(len(times))
    residuals = []
    if p.eta == 0:
        samples, res = laplace_samples(prep, np.zeros(n), threads)
        for k, t in enumerate(times):
            sol[:, k] = invert(samples, contour, t)
            leaks[k] = float(np.max(imag_leakage(samples, contour, t)))
            iters[k] = 1
            residuals.append(res[None, :])
    else:
        start = None
        for k, t in enumerate(times):
            try:
                u, it, hist, leak = picard_solve(prep, t, tol, max_iter, start, threads, freeze)
            except (PicardConvergenceError, PicardDivergenceError) as exc:
                raise type(exc)(f"{exc} (output time index {k})") from exc
            sol[:, k], iters[k], leaks[k] = u, it, leak
            residuals.append(hist)
            start = u if freeze == 1 else None
    return SolveResult(times, sol, iters, residuals, leaks, disc.nodes.coords.copy())


def probe_matrix(disc: Discretization, probes, n_x: int | None = None) -> sp.csr_matrix:
    """Sparse interpolation operator from node values to arbitrary probe positions."""
    n_x = disc.n_x if n_x is None else n_x
    rows, cols, vals = [], [], []
    for r, xp in enumerate(probes):
        hit = np.nonzero(np.isclose(disc.nodes.coords, xp, rtol=0, atol=1e-14))[0]
        if hit.size:
            rows.append(r), cols.append(int(hit[0])), vals.append(1.0)
            continue
        members, w = point_weights(disc.nodes, float(xp), disc.kernel, 0, n_x)
        rows.extend([r] * len(members)), cols.extend(members.tolist()), vals.extend(w.tolist())
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(probes), disc.n))
