"""scikit-learn style wrappers around the differentiation and solver layers."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .diffmat import ShapeRule, local_diff_matrix
from .experiment import resolve
from .geometry import build_nodes, build_stencils
from .metrics import error_norms
from .problems import make_builtin
from .solver import solve_time_grid


class RBFFDDifferentiator(TransformerMixin, BaseEstimator):
    """Applies a local RBF-FD derivative matrix to nodal data.

    ``fit`` takes the node coordinates (strictly increasing, shape (N,) or
    (N, 1)); ``transform`` takes rows of nodal values, shape (n_samples, N),
    and returns their ``order``-th derivative at the same nodes.
    """

    def __init__(self, order=1, n_x=5, family="multiquadric", shape_factor=0.5):
        self.order = order
        self.n_x = n_x
        self.family = family
        self.shape_factor = shape_factor

    def fit(self, X, y=None):
        x = check_array(X, ensure_2d=False, dtype=float).ravel()
        if self.order not in (0, 1, 2, 3):
            raise ValueError(f"order must be 0..3, got {self.order}")
        nodes = build_nodes(x[0], x[-1], spacing=x)
        stencils = build_stencils(nodes, self.n_x)
        self.nodes_ = nodes
        self.matrix_ = local_diff_matrix(nodes, stencils, ShapeRule(self.family, self.shape_factor), self.order)
        self.n_features_in_ = nodes.n
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        U = check_array(X, dtype=float)
        if U.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} nodal values per row, got {U.shape[1]}")
        return np.asarray(self.matrix_ @ U.T).T


class FractionalWaveSolver(RegressorMixin, BaseEstimator):
    """Built-in problem solved at requested times.

    ``fit`` resolves the discretisation and contour for ``problem``;
    ``predict(times)`` returns nodal solutions with shape (len(times), N).
    ``score(times)`` is minus the largest L_inf error against the known
    exact solution, so higher is better.
    """

    def __init__(self, problem="problem1", alpha=None, N=None, n_x=None, M=None,
                 contour=None, shape_factor=None, tol=None, threads=1):
        self.problem = problem
        self.alpha = alpha
        self.N = N
        self.n_x = n_x
        self.M = M
        self.contour = contour
        self.shape_factor = shape_factor
        self.tol = tol
        self.threads = threads

    def _overrides(self):
        keys = ("alpha", "N", "n_x", "M", "contour", "shape_factor", "tol")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}

    def fit(self, X=None, y=None):
        self.preset_ = make_builtin(self.problem, **self._overrides())
        self.disc_, self.contour_ = resolve(self.preset_)
        self.nodes_ = self.disc_.nodes.coords.copy()
        return self

    def _times(self, X):
        t = check_array(X, ensure_2d=False, dtype=float).ravel()
        lo, hi = self.contour_.t0, self.contour_.T
        if np.any((t < lo) | (t > hi)):
            raise ValueError(f"times must lie in the contour window [{lo}, {hi}]")
        return t

    def predict(self, X):
        check_is_fitted(self, "contour_")
        t = self._times(X)
        order = np.argsort(t, kind="stable")
        res = solve_time_grid(self.preset_.problem, self.disc_, self.contour_, t[order],
                              self.preset_.tol, 50, self.threads, self.preset_.freeze)
        out = np.empty((len(t), self.disc_.n))
        out[order] = res.solution.T
        return out

    def score(self, X, y=None, sample_weight=None):
        check_is_fitted(self, "contour_")
        exact = self.preset_.problem.exact
        if exact is None:
            raise ValueError(f"{self.problem} has no exact solution to score against")
        t = self._times(X)
        U = self.predict(t)
        return -max(error_norms(u, exact(self.nodes_, tk))[0] for u, tk in zip(U, t))
