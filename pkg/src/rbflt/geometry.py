"""1-D node sets and nearest-neighbour stencils."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INTERIOR, LEFT, RIGHT = "interior", "left", "right"


@dataclass(frozen=True)
class NodeSet:
    coords: np.ndarray
    boundary_flags: tuple

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def a(self) -> float:
        return float(self.coords[0])

    @property
    def b(self) -> float:
        return float(self.coords[-1])

    def index_of(self, side: str) -> int:
        return self.boundary_flags.index(side)


@dataclass(frozen=True)
class Stencil:
    center: int
    members: np.ndarray  # sorted global indices; doubles as the scatter map into L^FD columns

    @property
    def size(self) -> int:
        return len(self.members)


def build_nodes(a: float, b: float, n: int | None = None, spacing="uniform") -> NodeSet:
    """Nodes on [a, b]; ``spacing`` is ``"uniform"`` or an explicit coordinate list."""
    if isinstance(spacing, str):
        if spacing != "uniform":
            raise ValueError(f"unknown spacing {spacing!r}")
        if not a < b:
            raise ValueError(f"need a < b, got [{a}, {b}]")
        if n is None or n < 2:
            raise ValueError(f"need at least 2 nodes, got {n}")
        coords = np.linspace(a, b, int(n))
    else:
        coords = np.asarray(spacing, dtype=float)
        if coords.ndim != 1 or len(coords) < 2:
            raise ValueError("explicit spacing needs at least 2 coordinates")
        if np.any(np.diff(coords) <= 0):
            raise ValueError("node coordinates must be strictly increasing (no duplicates)")
        if coords[0] != a or coords[-1] != b:
            raise ValueError(f"explicit nodes must start at {a} and end at {b}")
        if n is not None and n != len(coords):
            raise ValueError(f"n={n} does not match {len(coords)} explicit coordinates")
    flags = (LEFT,) + (INTERIOR,) * (len(coords) - 2) + (RIGHT,)
    return NodeSet(coords, flags)


def nearest_indices(coords: np.ndarray, x: float, n_x: int) -> np.ndarray:
    """Indices of the ``n_x`` nodes nearest ``x``, sorted ascending; ties go to the lower index."""
    dist = np.abs(coords - x)
    # stable sort on distance keeps lower indices first among equal distances
    order = np.argsort(dist, kind="stable")[:n_x]
    return np.sort(order)


def build_stencils(nodes: NodeSet, n_x: int) -> list[Stencil]:
    if not 2 <= n_x <= nodes.n:
        raise ValueError(f"stencil size must satisfy 2 <= n_x <= N={nodes.n}, got {n_x}")
    return [Stencil(i, nearest_indices(nodes.coords, x, n_x)) for i, x in enumerate(nodes.coords)]


def stencil_half_width(nodes: NodeSet, st: Stencil) -> float:
    return float(np.max(np.abs(nodes.coords[st.members] - nodes.coords[st.center])))
