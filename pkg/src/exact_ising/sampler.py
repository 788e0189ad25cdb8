"""Exact Ising sampling on G_L at every inverse temperature.

For beta <= beta_c the heat-bath chain mixes fast and CFTP runs directly
on G_L. Above beta_c the sampler instead runs plus-boundary CFTP on
G_{L-1} at the dual temperature, pins the outer-face spin to +1, converts
to bonds on the dual lattice, swaps to the complementary primal bonds and
colours the primal clusters. The final global spin flip is unnecessary:
it would not change the bonds drawn.

Each master seed feeds three independent sub-streams: CFTP updates,
dual-bond coins and cluster-spin coins.
"""

from __future__ import annotations

import functools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from . import random_cluster as rc
from .cftp import DEFAULT_MAX_UPDATES, CoalescenceCapExceeded, cftp_batch, cftp_sample
from .lattice import build_dual, build_square_lattice
from .rng import (STREAM_BONDS, STREAM_CLUSTER_SPINS, KeyedStream, RandomnessSchedule,
                  philox4x64, split_seed, to_unit)
from .spins import BETA_C, as_boundary

BRANCHES = ("auto", "direct", "dual")


@dataclass(frozen=True)
class SamplerConfig:
    L: int
    beta: float
    seed: int = 0
    branch: str = "auto"
    max_updates: int = DEFAULT_MAX_UPDATES
    max_epoch: Optional[int] = None
    boundary: str = "free"

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L!r}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta!r}")
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}, got {self.branch!r}")
        as_boundary(self.boundary)


@dataclass
class SampleRecord:
    spins: np.ndarray
    seed: int
    branch: str
    epochs_used: int
    total_updates: int
    wall_ns: int = 0


@dataclass
class BatchResult:
    spins: np.ndarray
    seeds: np.ndarray
    branch: str
    epochs_used: np.ndarray
    total_updates: np.ndarray
    capped: np.ndarray


@dataclass(frozen=True)
class DualityReport:
    branch: str
    beta: float
    beta_c: float
    p: float
    beta_dual: Optional[float]
    p_dual: Optional[float]


def resolve_branch(config: SamplerConfig) -> str:
    """Which route the sampler takes for ``config``."""
    bc = as_boundary(config.boundary).value
    if config.branch == "dual":
        if config.L < 2:
            raise ValueError("the dual route needs L >= 2")
        if bc != "free":
            raise ValueError("the dual route samples free boundary only")
        return "dual"
    if config.branch == "direct" or config.L == 1 or bc != "free":
        return "direct"
    return "direct" if config.beta <= BETA_C else "dual"


def describe(beta: float) -> DualityReport:
    """The quantities the sampler would use at ``beta``."""
    if not beta >= 0:
        raise ValueError(f"beta must be nonnegative, got {beta!r}")
    p = rc.beta_to_p(beta)
    bstar = rc.dual_beta(beta) if beta > 0 else None
    return DualityReport("direct" if beta <= BETA_C else "dual", beta, BETA_C, p,
                         bstar, rc.dual_p(p) if beta > 0 else None)


@functools.lru_cache(maxsize=None)
def _lattice(L: int):
    return build_square_lattice(L)


@functools.lru_cache(maxsize=None)
def _dual(L: int):
    return build_dual(L)


def run_sampler(config: SamplerConfig) -> SampleRecord:
    """One exact sample with its CFTP statistics.

    Raises
    ------
    CoalescenceCapExceeded
    """
    start = time.perf_counter_ns()
    branch = resolve_branch(config)
    L, seed = int(config.L), config.seed
    if branch == "direct":
        G = _lattice(L)
        res = cftp_sample(G, config.beta, config.boundary, RandomnessSchedule(seed, G.vertex_count),
                          max_updates=config.max_updates, max_epoch=config.max_epoch)
        spins = res.sample
    else:
        inner = _lattice(L - 1)
        G_dual, dmap = _dual(L)
        bstar = rc.dual_beta(config.beta)
        res = cftp_sample(inner, bstar, "plus", RandomnessSchedule(seed, inner.vertex_count),
                          max_updates=config.max_updates, max_epoch=config.max_epoch)
        sigma_star = np.append(res.sample, np.int8(1))
        omega_star = rc.ising_to_rc(G_dual, sigma_star, rc.beta_to_p(bstar),
                                    KeyedStream(seed, STREAM_BONDS))
        omega = rc.dual_rc_state(omega_star, dmap.inverse())
        spins = rc.rc_to_ising(_lattice(L), omega, KeyedStream(seed, STREAM_CLUSTER_SPINS))
    return SampleRecord(spins, seed, branch, res.epochs_used, res.total_updates,
                        time.perf_counter_ns() - start)


def sample_ising(config: SamplerConfig) -> np.ndarray:
    """Exact draw from the Boltzmann measure on G_L."""
    return run_sampler(config).spins


def run_many(config: SamplerConfig, n: int, jobs: int = 1) -> list[SampleRecord]:
    """Records for seeds ``config.seed, ..., config.seed + n - 1`` in seed order."""
    configs = [_with_seed(config, config.seed + i) for i in range(n)]
    if jobs <= 1:
        return [run_sampler(c) for c in configs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_sampler, configs))


def _with_seed(config: SamplerConfig, seed: int) -> SamplerConfig:
    return SamplerConfig(config.L, config.beta, seed, config.branch, config.max_updates,
                         config.max_epoch, config.boundary)


@numba.njit(cache=True, nogil=True)
def _finish_dual(keys, tilde, dual_edges, dual_to_primal, primal_edges, n_primal, p_star, out):
    n_inner = tilde.shape[1]
    m = dual_edges.shape[0]
    zero = np.uint64(0)
    sigma = np.empty(n_inner + 1, dtype=np.int8)
    open_primal = np.empty(m, dtype=np.bool_)
    labels = np.empty(n_primal, dtype=np.int64)
    for i in range(keys.shape[0]):
        k0, k1 = keys[i, 0], keys[i, 1]
        sigma[:n_inner] = tilde[i]
        sigma[n_inner] = 1
        for d in range(m):
            w0, w1, w2, w3 = philox4x64(np.uint64(d), np.uint64(STREAM_BONDS), zero, zero, k0, k1)
            kept = sigma[dual_edges[d, 0]] == sigma[dual_edges[d, 1]] and to_unit(w0) < p_star
            open_primal[dual_to_primal[d]] = not kept
        rc._label_components(n_primal, primal_edges, open_primal, labels)
        for v in range(n_primal):
            w0, w1, w2, w3 = philox4x64(np.uint64(labels[v]), np.uint64(STREAM_CLUSTER_SPINS),
                                        zero, zero, k0, k1)
            out[i, v] = 1 if to_unit(w0) < 0.5 else -1


def sample_batch(config: SamplerConfig, n: int, allow_capped: bool = False) -> BatchResult:
    """Compiled equivalent of :func:`run_many`, bit-identical per seed.

    Capped seeds raise unless ``allow_capped``; their spin rows are then
    meaningless and flagged in ``capped``.
    """
    branch = resolve_branch(config)
    L = int(config.L)
    seeds = config.seed + np.arange(n, dtype=np.int64)
    if branch == "direct":
        G = _lattice(L)
        spins, epochs, updates, capped = cftp_batch(G, config.beta, config.boundary, seeds.tolist(),
                                                    config.max_updates, config.max_epoch)
    else:
        G_dual, dmap = _dual(L)
        bstar = rc.dual_beta(config.beta)
        tilde, epochs, updates, capped = cftp_batch(_lattice(L - 1), bstar, "plus", seeds.tolist(),
                                                    config.max_updates, config.max_epoch)
        spins = np.empty((n, L * L), dtype=np.int8)
        keys = np.array([split_seed(s) for s in seeds.tolist()], dtype=np.uint64).reshape(-1, 2)
        _finish_dual(keys, tilde, G_dual.edges, dmap.dual_to_primal, _lattice(L).edges, L * L,
                     rc.beta_to_p(bstar), spins)
    if capped.any() and not allow_capped:
        i = int(np.argmax(capped))
        raise CoalescenceCapExceeded(int(updates[i]), int(epochs[i]), int(config.max_updates))
    return BatchResult(spins, seeds, branch, epochs, updates, capped)
