"""Random-cluster states, the Edwards-Sokal conversions and planar duality.

A bond configuration omega on a graph with E edges is a boolean array of
length E. The FK weight of omega is ``p^|omega| (1-p)^(E-|omega|) q^C(omega)``
with C the number of connected components of (V, omega), isolated vertices
included. q = 2 is the Ising case with ``p = 1 - exp(-beta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .lattice import DualMap, LatticeGraph


def beta_to_p(beta: float) -> float:
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    return -math.expm1(-beta)


def p_to_beta(p: float) -> float:
    if not 0 <= p < 1:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    return -math.log1p(-p)


def dual_p(p: float) -> float:
    """Dual edge probability; an involution on [0, 1]."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return 1.0 - p / (2.0 - p)


def dual_beta(beta: float) -> float:
    """log(coth(beta / 2)); maps (beta_c, inf) onto (0, beta_c) and back."""
    if beta <= 0:
        raise ValueError(f"dual inverse temperature diverges at beta = {beta}")
    # coth(b/2) = (1 + e^-b) / (1 - e^-b)
    return math.log1p(math.exp(-beta)) - math.log(-math.expm1(-beta))


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    labels: np.ndarray
    component_count: int


@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


@numba.njit(cache=True)
def _label_components(n, edges, included, labels):
    """Union by size with path compression; labels are the smallest vertex per component."""
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for e in range(edges.shape[0]):
        if not included[e]:
            continue
        a = _find(parent, edges[e, 0])
        b = _find(parent, edges[e, 1])
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    smallest = np.full(n, n, dtype=np.int64)
    count = 0
    for v in range(n):
        r = _find(parent, v)
        if smallest[r] == n:
            smallest[r] = v
            count += 1
        labels[v] = smallest[r]
    return count


@numba.njit(cache=True)
def _all_component_counts(n, edges, out):
    m = edges.shape[0]
    included = np.zeros(m, dtype=np.bool_)
    labels = np.empty(n, dtype=np.int64)
    for mask in range(out.shape[0]):
        for e in range(m):
            included[e] = (mask >> e) & 1
        out[mask] = _label_components(n, edges, included, labels)


def _as_bonds(G: LatticeGraph, omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=bool)
    if omega.shape != (G.edge_count,):
        raise ValueError(f"bond configuration has length {omega.size}, graph has {G.edge_count} edges")
    return omega


def connected_components(G: LatticeGraph, omega) -> ComponentLabeling:
    omega = _as_bonds(G, omega)
    labels = np.empty(G.vertex_count, dtype=np.int64)
    count = _label_components(G.vertex_count, G.edges, omega, labels)
    return ComponentLabeling(labels, int(count))


def all_component_counts(G: LatticeGraph) -> np.ndarray:
    """C(omega) for every bitmask omega in [0, 2^E), bit e set iff edge e is open."""
    if G.edge_count > 26:
        raise ValueError("too many edges to enumerate bond configurations")
    out = np.empty(1 << G.edge_count, dtype=np.int64)
    _all_component_counts(G.vertex_count, G.edges, out)
    return out


def _uniforms(rng, counters: np.ndarray) -> np.ndarray:
    # keyed streams index by counter; a numpy Generator just draws in order
    if hasattr(rng, "uniforms"):
        return rng.uniforms(counters)
    return rng.random(len(counters))


def satisfied_edges(G: LatticeGraph, sigma) -> np.ndarray:
    sigma = np.asarray(sigma)
    return sigma[G.edges[:, 0]] == sigma[G.edges[:, 1]]


def ising_to_rc(G: LatticeGraph, sigma, p: float, rng) -> np.ndarray:
    """Keep each satisfied edge independently with probability p.

    ``rng`` is a :class:`~exact_ising.rng.KeyedStream` (edge e uses counter e)
    or a ``numpy.random.Generator``.
    """
    sigma = np.asarray(sigma)
    if sigma.shape != (G.vertex_count,):
        raise ValueError("spin configuration must cover every vertex, auxiliary one included")
    u = _uniforms(rng, np.arange(G.edge_count))
    return satisfied_edges(G, sigma) & (u < p)


def rc_to_ising(G: LatticeGraph, omega, rng) -> np.ndarray:
    """Give every connected component of omega an independent fair spin.

    With a keyed stream the coin of a component is the draw at its label,
    the smallest vertex it contains.
    """
    comp = connected_components(G, omega)
    u = _uniforms(rng, np.arange(G.vertex_count))
    return np.where(u[comp.labels] < 0.5, 1, -1).astype(np.int8)


def dual_rc_state(omega, dual_map: DualMap) -> np.ndarray:
    """omega* on the dual edges: e* is open iff e is closed."""
    omega = np.asarray(omega, dtype=bool)
    if omega.shape != (len(dual_map),):
        raise ValueError("bond configuration does not match the dual map")
    out = np.empty_like(omega)
    out[dual_map.primal_to_dual] = ~omega
    return out


def rc_weight(G: LatticeGraph, omega, p: float, q: float = 2.0) -> float:
    omega = _as_bonds(G, omega)
    k = int(omega.sum())
    c = connected_components(G, omega).component_count
    return p**k * (1 - p) ** (G.edge_count - k) * q**c
