"""Brute-force exact distributions and the statistics used to certify samplers.

Ising outcomes are indexed by bitmask (bit v set iff spin v is +1); bond
configurations by bitmask over edge indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from . import random_cluster as rc
from .lattice import LatticeGraph
from .spins import as_boundary

MAX_SPIN_VERTICES = 20
MAX_BOND_EDGES = 22


class SizeGuardError(ValueError):
    """The requested table is too large to enumerate."""


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """Exact probabilities per outcome index and the log of the normaliser."""

    probs: np.ndarray
    log_Z: float

    @property
    def Z(self) -> float:
        return float(np.exp(self.log_Z))

    def __len__(self) -> int:
        return len(self.probs)

    def save(self, path) -> None:
        """Text fixture, one ``index probability`` pair per line."""
        lines = [f"# logZ {self.log_Z!r}"]
        lines += [f"{i} {p!r}" for i, p in enumerate(self.probs.tolist())]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "DistributionTable":
        text = Path(path).read_text().splitlines()
        log_Z = float(text[0].split()[2])
        rows = np.array([line.split() for line in text[1:]], dtype=float)
        probs = np.zeros(int(rows[:, 0].max()) + 1)
        probs[rows[:, 0].astype(int)] = rows[:, 1]
        return cls(probs, log_Z)


def spin_matrix(n: int) -> np.ndarray:
    """All 2^n configurations as rows, row i encoding state index i."""
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
    return np.where(bits == 1, 1, -1).astype(np.int8)


def bond_matrix(m: int) -> np.ndarray:
    return ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1).astype(bool)


def agreement_table(G: LatticeGraph, bc="free") -> np.ndarray:
    """Exponent of the Boltzmann weight over beta for every state index."""
    if G.vertex_count > MAX_SPIN_VERTICES:
        raise SizeGuardError(f"{G.vertex_count} vertices exceeds the limit of {MAX_SPIN_VERTICES}")
    S = spin_matrix(G.vertex_count)
    agree = (S[:, G.edges[:, 0]] == S[:, G.edges[:, 1]]).sum(axis=1)
    sign = as_boundary(bc).sign
    if sign:
        agree = agree + ((S == sign) * G.boundary_deficiency).sum(axis=1)
    return agree


def enumerate_boltzmann(G: LatticeGraph, beta: float, bc="free") -> DistributionTable:
    a = agreement_table(G, bc)
    # shift by the max exponent so large beta does not overflow
    w = np.exp(beta * (a - a.max()))
    s = w.sum()
    return DistributionTable(w / s, float(np.log(s) + beta * a.max()))


def enumerate_rc(G: LatticeGraph, p: float, q: float = 2.0) -> DistributionTable:
    if G.edge_count > MAX_BOND_EDGES:
        raise SizeGuardError(f"{G.edge_count} edges exceeds the limit of {MAX_BOND_EDGES}")
    size = bond_matrix(G.edge_count).sum(axis=1)
    comps = rc.all_component_counts(G)
    w = p**size * (1 - p) ** (G.edge_count - size) * float(q) ** comps
    return DistributionTable(w / w.sum(), float(np.log(w.sum())))


def empirical(indices, K: int) -> np.ndarray:
    """Counts per outcome index."""
    return np.bincount(np.asarray(indices, dtype=np.int64), minlength=K)


def _as_probs(x) -> np.ndarray:
    if isinstance(x, DistributionTable):
        return x.probs
    x = np.asarray(x, dtype=float)
    total = x.sum()
    if total <= 0:
        raise ValueError("empty sample")
    return x / total


def tv_distance(a, b) -> float:
    """Half the L1 distance; count vectors are normalised first."""
    pa, pb = _as_probs(a), _as_probs(b)
    if pa.shape != pb.shape:
        raise ValueError(f"outcome spaces differ: {pa.shape[0]} vs {pb.shape[0]}")
    return float(0.5 * np.abs(pa - pb).sum())


def chi_square(counts, expected: DistributionTable) -> tuple[float, int]:
    """Pearson statistic and degrees of freedom.

    Bins whose expected count is below 5 are merged into a single bin; if
    that bin is itself under 5 it is folded into the smallest regular bin.
    """
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    if n <= 0:
        raise ValueError("empty sample")
    probs = expected.probs
    if counts.shape != probs.shape:
        raise ValueError("outcome spaces differ")
    if np.any(probs <= 0):
        raise ValueError("expected probabilities must all be positive")
    exp_counts = n * probs
    small = exp_counts < 5
    obs = list(counts[~small])
    exp = list(exp_counts[~small])
    if small.any():
        pooled_o, pooled_e = counts[small].sum(), exp_counts[small].sum()
        if pooled_e >= 5 or not exp:
            obs.append(pooled_o)
            exp.append(pooled_e)
        else:
            j = int(np.argmin(exp))
            obs[j] += pooled_o
            exp[j] += pooled_e
    obs, exp = np.array(obs), np.array(exp)
    return float(((obs - exp) ** 2 / exp).sum()), len(exp) - 1


def chi_square_critical(dof: int, level: float = 0.9999) -> float:
    return float(stats.chi2.ppf(level, dof))


def ising_to_rc_kernel(G: LatticeGraph, p: float) -> np.ndarray:
    """K[sigma, omega]: probability that the spin-to-bond step maps sigma to omega."""
    S = spin_matrix(G.vertex_count)
    sat = S[:, G.edges[:, 0]] == S[:, G.edges[:, 1]]
    B = bond_matrix(G.edge_count)
    K = np.ones((len(sat), len(B)))
    for e in range(G.edge_count):
        keep = sat[:, e][:, None] * p
        K *= np.where(B[:, e][None, :], keep, 1.0 - keep)
    return K


def rc_to_ising_kernel(G: LatticeGraph) -> np.ndarray:
    """K[omega, sigma]: 2^-C(omega) when sigma is constant on omega's clusters, else 0."""
    S = spin_matrix(G.vertex_count)
    sat = S[:, G.edges[:, 0]] == S[:, G.edges[:, 1]]
    B = bond_matrix(G.edge_count)
    compatible = np.ones((len(B), len(S)), dtype=bool)
    for e in range(G.edge_count):
        compatible &= ~B[:, e][:, None] | sat[:, e][None, :]
    comps = rc.all_component_counts(G)
    return compatible * (0.5 ** comps)[:, None]


@dataclass(frozen=True)
class ESCheckReport:
    spin_to_bond_error: float
    bond_to_spin_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.spin_to_bond_error <= self.tolerance and self.bond_to_spin_error <= self.tolerance

    def __bool__(self) -> bool:
        return self.passed


def es_joint_check(G: LatticeGraph, beta: float, tol: float = 1e-10) -> ESCheckReport:
    """Both Edwards-Sokal pushforwards, by exact summation.

    Checks ``pi K_{sigma->omega} = mu_p`` and ``mu_p K_{omega->sigma} = pi``
    with the maximum absolute deviation over outcomes.
    """
    if G.vertex_count > 12 or G.edge_count > 14:
        raise SizeGuardError("joint check limited to 12 vertices and 14 edges")
    p = rc.beta_to_p(beta)
    pi = enumerate_boltzmann(G, beta).probs
    mu = enumerate_rc(G, p).probs
    err1 = np.abs(pi @ ising_to_rc_kernel(G, p) - mu).max()
    err2 = np.abs(mu @ rc_to_ising_kernel(G) - pi).max()
    return ESCheckReport(float(err1), float(err2), tol)


def bond_index_map(dual_map) -> np.ndarray:
    """Dual bitmask of omega* for every primal bitmask omega."""
    m = len(dual_map)
    B = bond_matrix(m)
    Bstar = np.empty_like(B)
    Bstar[:, dual_map.primal_to_dual] = ~B
    return Bstar.astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))


def duality_error(G: LatticeGraph, G_dual: LatticeGraph, dual_map, p: float, p_dual=None) -> float:
    """max |mu_p(omega) - mu*_{p*}(omega*)| over all omega."""
    if p_dual is None:
        p_dual = rc.dual_p(p)
    mu = enumerate_rc(G, p).probs
    mu_star = enumerate_rc(G_dual, p_dual).probs
    return float(np.abs(mu - mu_star[bond_index_map(dual_map)]).max())


def plus_conditional_error(L: int, beta: float) -> float:
    """Plus boundary on G_{L-1} against G_L* conditioned on the outer spin being +1."""
    from .lattice import build_dual, build_square_lattice

    G_dual, _ = build_dual(L)
    inner = build_square_lattice(L - 1)
    joint = enumerate_boltzmann(G_dual, beta).probs
    aux_bit = 1 << G_dual.aux_vertex
    idx = np.arange(len(joint))
    cond = joint[(idx & aux_bit) != 0]
    cond = cond / cond.sum()
    return float(np.abs(cond - enumerate_boltzmann(inner, beta, "plus").probs).max())


def dual_route_distribution(L: int, beta: float) -> np.ndarray:
    """Exact output law of the low-temperature route on G_L, by summation.

    Plus-boundary law on G_{L-1} at the dual temperature, outer spin +1,
    spin-to-bond kernel on the dual, complement to primal bonds, cluster
    colouring on G_L.
    """
    from .lattice import build_dual, build_square_lattice

    G = build_square_lattice(L)
    G_dual, dmap = build_dual(L)
    bstar = rc.dual_beta(beta)
    tilde = enumerate_boltzmann(build_square_lattice(L - 1), bstar, "plus").probs
    pstar = rc.beta_to_p(bstar)
    K = ising_to_rc_kernel(G_dual, pstar)
    rows = np.arange(len(tilde)) | (1 << G_dual.aux_vertex)
    bonds_dual = tilde @ K[rows]
    # primal bitmask omega corresponds to dual bitmask omega*
    bonds = bonds_dual[bond_index_map(dmap)]
    return bonds @ rc_to_ising_kernel(G)
