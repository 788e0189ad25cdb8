"""Boltzmann weights and the heat-bath single-site update.

Spin configurations are flat ``int8`` arrays of +1/-1 indexed by vertex.
The measure on a graph G at inverse temperature beta gives a configuration
weight ``exp(beta * #agreeing edges)``; a plus (minus) boundary condition
adds one agreement for every phantom +1 (-1) neighbour outside the lattice.
"""

from __future__ import annotations

import enum
import math

import numba
import numpy as np

from .lattice import LatticeGraph

#: critical inverse temperature ln(1 + sqrt 2)
BETA_C = math.log1p(math.sqrt(2.0))


class Boundary(str, enum.Enum):
    FREE = "free"
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return {"free": 0, "plus": 1, "minus": -1}[self.value]


def as_boundary(bc) -> Boundary:
    try:
        return Boundary(bc)
    except ValueError:
        raise ValueError(f"unknown boundary condition {bc!r}; expected free, plus or minus") from None


def all_plus(n: int) -> np.ndarray:
    return np.ones(n, dtype=np.int8)


def all_minus(n: int) -> np.ndarray:
    return -np.ones(n, dtype=np.int8)


def leq(sigma: np.ndarray, eta: np.ndarray) -> bool:
    """Coordinatewise partial order."""
    return bool(np.all(np.asarray(sigma) <= np.asarray(eta)))


def state_index(sigma: np.ndarray) -> int:
    """Bitmask with bit v set iff sigma[v] = +1."""
    bits = np.asarray(sigma) > 0
    return int(np.dot(bits, 1 << np.arange(len(bits), dtype=np.int64)))


def from_index(index: int, n: int) -> np.ndarray:
    bits = (int(index) >> np.arange(n)) & 1
    return np.where(bits == 1, 1, -1).astype(np.int8)


def state_indices(samples: np.ndarray) -> np.ndarray:
    """Row-wise :func:`state_index` for a stack of configurations."""
    samples = np.atleast_2d(samples)
    weights = 1 << np.arange(samples.shape[1], dtype=np.int64)
    return (samples > 0).astype(np.int64) @ weights


def agreement_counts(G: LatticeGraph, sigma: np.ndarray, v: int, bc="free") -> tuple[int, int]:
    """Numbers of +1 and -1 neighbours of ``v``, counting edge multiplicity.

    Phantom boundary neighbours are included for plus/minus boundary.
    """
    G._check_vertex(v)
    sign = as_boundary(bc).sign
    nbrs = G.nbr_idx[G.nbr_ptr[v]:G.nbr_ptr[v + 1]]
    n_plus = int(np.count_nonzero(np.asarray(sigma)[nbrs] > 0))
    n_minus = len(nbrs) - n_plus
    d = int(G.boundary_deficiency[v])
    if sign > 0:
        n_plus += d
    elif sign < 0:
        n_minus += d
    return n_plus, n_minus


def plus_probability(n_plus: int, n_minus: int, beta: float) -> float:
    """Conditional probability that a refreshed spin is +1.

    Evaluated as a logistic function so no positive argument is ever
    exponentiated.
    """
    x = beta * (n_plus - n_minus)
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def plus_probability_table(beta: float, max_delta: int) -> np.ndarray:
    """``table[d + max_delta] = plus_probability`` for ``n_plus - n_minus = d``."""
    return np.array([plus_probability(d, 0, beta) for d in range(-max_delta, max_delta + 1)])


def max_field(G: LatticeGraph) -> int:
    return int(np.max(G.degree() + G.boundary_deficiency)) if G.vertex_count else 0


@numba.njit(cache=True)
def local_update(ptr, idx, defic, bc_sign, table, offset, spins, v, u):
    """In-place grand-coupling update; strict ``u < p_plus`` gives +1."""
    delta = 0
    for k in range(ptr[v], ptr[v + 1]):
        delta += spins[idx[k]]
    delta += bc_sign * defic[v]
    spins[v] = 1 if u < table[delta + offset] else -1


def heat_bath_update(G: LatticeGraph, sigma: np.ndarray, v: int, u: float, beta: float,
                     bc="free", inplace: bool = False) -> np.ndarray:
    """Refresh the spin at ``v`` from its conditional law using the uniform ``u``.

    This is the deterministic update map phi(sigma, v, u) shared by all
    coupled chains; returns a new array unless ``inplace`` is set.
    """
    G._check_vertex(v)
    out = sigma if inplace else np.array(sigma, dtype=np.int8)
    n_plus, n_minus = agreement_counts(G, out, v, bc)
    out[v] = 1 if u < plus_probability(n_plus, n_minus, beta) else -1
    return out


def agreements(G: LatticeGraph, sigma: np.ndarray, bc="free") -> int:
    """Agreeing edges plus boundary agreements, the exponent of the weight over beta."""
    sigma = np.asarray(sigma)
    n = int(np.count_nonzero(sigma[G.edges[:, 0]] == sigma[G.edges[:, 1]]))
    sign = as_boundary(bc).sign
    if sign:
        n += int(np.sum(G.boundary_deficiency[sigma == sign]))
    return n


def unnormalized_weight(G: LatticeGraph, sigma: np.ndarray, beta: float, bc="free") -> float:
    return math.exp(beta * agreements(G, sigma, bc))
