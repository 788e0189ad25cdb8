"""Square lattice G_L and its planar dual multigraph.

Vertex ``(r, c)`` of G_L (0-based row and column) has index ``r * L + c``.
Edges are numbered horizontals first, row by row, then verticals, row by
row. The dual of G_L is G_{L-1} with one extra vertex (the outer face)
glued to its boundary; its first 2(L-1)(L-2) edges are exactly the edges of
G_{L-1} in canonical order, followed by the edges to the outer face in the
order of the primal boundary edges they cross.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class LatticeGraph:
    """Undirected multigraph with a Z^2 embedding for the non-auxiliary vertices.

    Parameters
    ----------
    vertex_count : int
    edges : ndarray of shape (E, 2)
        Endpoints of each edge; parallel edges each get their own row.
    boundary_deficiency : ndarray of shape (vertex_count,)
        Number of Z^2 neighbours missing from the vertex set. These are the
        phantom neighbours a plus/minus boundary condition pins.
    aux_vertex : int or None
        Index of the outer-face vertex when the graph is a dual.
    side : int
        Side length of the square part.
    """

    vertex_count: int
    edges: np.ndarray
    boundary_deficiency: np.ndarray
    aux_vertex: Optional[int] = None
    side: int = 0
    nbr_ptr: np.ndarray = field(init=False, repr=False, compare=False)
    nbr_idx: np.ndarray = field(init=False, repr=False, compare=False)
    nbr_edge: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        defic = np.asarray(self.boundary_deficiency, dtype=np.int64)
        if defic.shape != (self.vertex_count,):
            raise ValueError("boundary_deficiency must have one entry per vertex")
        if edges.size and (edges.min() < 0 or edges.max() >= self.vertex_count):
            raise ValueError("edge endpoint out of range")
        # CSR adjacency, each edge listed once from each endpoint
        heads = np.concatenate([edges[:, 0], edges[:, 1]])
        tails = np.concatenate([edges[:, 1], edges[:, 0]])
        eids = np.concatenate([np.arange(len(edges))] * 2)
        order = np.lexsort((eids, heads))
        ptr = np.zeros(self.vertex_count + 1, dtype=np.int64)
        np.add.at(ptr, heads + 1, 1)
        ptr = np.cumsum(ptr)
        for name, arr in (
            ("edges", edges),
            ("boundary_deficiency", defic),
            ("nbr_ptr", ptr),
            ("nbr_idx", tails[order].astype(np.int64)),
            ("nbr_edge", eids[order].astype(np.int64)),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int | None = None):
        deg = np.diff(self.nbr_ptr)
        return deg if v is None else int(deg[v])

    def adjacency(self, v: int) -> list[tuple[int, int]]:
        """``(neighbour, edge index)`` pairs at ``v``, parallel edges repeated."""
        self._check_vertex(v)
        lo, hi = self.nbr_ptr[v], self.nbr_ptr[v + 1]
        return list(zip(self.nbr_idx[lo:hi].tolist(), self.nbr_edge[lo:hi].tolist()))

    def coords(self, v: int) -> tuple[int, int]:
        """Row and column of a non-auxiliary vertex."""
        self._check_vertex(v)
        if v == self.aux_vertex:
            raise ValueError("the auxiliary vertex has no lattice coordinates")
        return divmod(v, self.side)

    def index(self, r: int, c: int) -> int:
        if not (0 <= r < self.side and 0 <= c < self.side):
            raise ValueError(f"({r}, {c}) is outside the {self.side}x{self.side} lattice")
        return r * self.side + c

    def _check_vertex(self, v: int):
        if not 0 <= v < self.vertex_count:
            raise IndexError(f"vertex {v} out of range for {self.vertex_count} vertices")


@dataclass(frozen=True, eq=False)
class DualMap:
    """Bijection between primal edge indices and the dual edges crossing them."""

    primal_to_dual: np.ndarray
    dual_to_primal: np.ndarray

    def __post_init__(self):
        for arr in (self.primal_to_dual, self.dual_to_primal):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return len(self.primal_to_dual)

    def inverse(self) -> "DualMap":
        """The same bijection read from the dual side."""
        return DualMap(self.dual_to_primal, self.primal_to_dual)


def _square_edges(L: int) -> np.ndarray:
    idx = np.arange(L * L).reshape(L, L)
    horiz = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    vert = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return np.concatenate([horiz, vert]).reshape(-1, 2)


def build_square_lattice(L: int) -> LatticeGraph:
    """The L x L square lattice with free boundary.

    >>> g = build_square_lattice(3)
    >>> g.vertex_count, g.edge_count
    (9, 12)
    """
    if int(L) != L or L < 1:
        raise ValueError(f"lattice side must be a positive integer, got {L!r}")
    L = int(L)
    edges = _square_edges(L)
    deg = np.bincount(edges.ravel(), minlength=L * L)
    return LatticeGraph(L * L, edges, 4 - deg, side=L)


def build_dual(L: int) -> tuple[LatticeGraph, DualMap]:
    """Dual multigraph of G_L together with the edge crossing map.

    A face touching the outer boundary on k sides gets k parallel edges to
    the outer-face vertex, so corner faces carry two (all four when L = 2).
    """
    if int(L) != L or L < 2:
        raise ValueError(f"the dual needs L >= 2, got {L!r}")
    L = int(L)
    M = L - 1
    aux = M * M
    n_h = L * (L - 1)  # primal horizontals; verticals follow

    inner = _square_edges(M) if M > 1 else np.zeros((0, 2), dtype=np.int64)
    n_inner_h = M * (M - 1)
    primal_to_dual = np.full(2 * L * (L - 1), -1, dtype=np.int64)

    # inner dual horizontal (i,j)-(i,j+1) crosses primal vertical (i,j+1)-(i+1,j+1)
    for k in range(n_inner_h):
        i, j = divmod(k, M - 1)
        primal_to_dual[n_h + i * L + (j + 1)] = k
    # inner dual vertical (i,j)-(i+1,j) crosses primal horizontal (i+1,j)-(i+1,j+1)
    for k in range(len(inner) - n_inner_h):
        i, j = divmod(k, M)
        primal_to_dual[(i + 1) * (L - 1) + j] = n_inner_h + k

    outer = []
    for e in range(2 * L * (L - 1)):
        if primal_to_dual[e] >= 0:
            continue
        if e < n_h:
            r, c = divmod(e, L - 1)
            face = (r - 1) * M + c if r == L - 1 else r * M + c
        else:
            r, c = divmod(e - n_h, L)
            face = r * M + (c - 1) if c == L - 1 else r * M + c
        primal_to_dual[e] = len(inner) + len(outer)
        outer.append((face, aux))

    edges = np.concatenate([inner, np.asarray(outer, dtype=np.int64)])
    dual_to_primal = np.empty_like(primal_to_dual)
    dual_to_primal[primal_to_dual] = np.arange(len(primal_to_dual))
    graph = LatticeGraph(aux + 1, edges, np.zeros(aux + 1, dtype=np.int64), aux_vertex=aux, side=M)
    return graph, DualMap(primal_to_dual, dual_to_primal)
