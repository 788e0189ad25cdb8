"""Exactness checks shared by ``exact-ising validate`` and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from . import random_cluster as rc
from .lattice import build_dual, build_square_lattice
from .sampler import SamplerConfig, sample_batch
from .spins import BETA_C, as_boundary, max_field, plus_probability_table, state_indices

ES_BETAS = (0.3, BETA_C, 1.5)
SAMPLING_BETAS = (0.4, BETA_C, 1.2)
DUALITY_PS = (0.2, 2 - math.sqrt(2), 0.8)
TV_THRESHOLD = 0.03
CHI2_LEVEL = 0.9999
N_SAMPLES = 200_000


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.threshold)


def monotonicity_violations(G, beta: float, bc="free", n_u: int = 64) -> int:
    """Exhaustive count of (sigma <= eta, v, u) with phi(sigma) not <= phi(eta).

    u runs over the grid k / n_u. Vectorised over all 2^N states at once.
    """
    S = oracle.spin_matrix(G.vertex_count).astype(np.int64)
    offset = max_field(G)
    table = plus_probability_table(beta, offset)
    sign = as_boundary(bc).sign
    below = np.all(S[:, None, :] <= S[None, :, :], axis=2)
    bad = 0
    for v in range(G.vertex_count):
        nbrs = G.nbr_idx[G.nbr_ptr[v]:G.nbr_ptr[v + 1]]
        delta = S[:, nbrs].sum(axis=1) + sign * G.boundary_deficiency[v]
        p_plus = table[delta + offset]
        for k in range(n_u):
            new_v = np.where(k / n_u < p_plus, 1, -1)
            # other coordinates are untouched, so order can only break at v
            bad += int(np.count_nonzero(below & (new_v[:, None] > new_v[None, :])))
    return bad


def analytic_checks() -> list[Check]:
    checks = [
        Check("self-dual beta", abs(rc.dual_beta(BETA_C) - BETA_C), 1e-12),
        Check("self-dual p", abs(rc.dual_p(2 - math.sqrt(2)) - (2 - math.sqrt(2))), 1e-12),
    ]
    betas = np.linspace(0.05, 3.0, 60)
    checks.append(Check("dual beta involution",
                        max(abs(rc.dual_beta(rc.dual_beta(b)) - b) for b in betas), 1e-10))
    checks.append(Check("dual beta vs dual p",
                        max(abs(rc.dual_beta(b) - rc.p_to_beta(rc.dual_p(rc.beta_to_p(b))))
                            for b in betas), 1e-10))
    ps = np.linspace(0.0, 1.0, 41)
    checks.append(Check("dual p involution", max(abs(rc.dual_p(rc.dual_p(p)) - p) for p in ps), 1e-12))

    G3 = build_square_lattice(3)
    D3, m3 = build_dual(3)
    for p in DUALITY_PS:
        checks.append(Check(f"rc duality G3 p={p:.4g}", oracle.duality_error(G3, D3, m3, p), 1e-10))
    for L in (2, 3):
        G = build_square_lattice(L)
        for b in ES_BETAS:
            rep = oracle.es_joint_check(G, b)
            checks.append(Check(f"edwards-sokal G{L} beta={b:.4g}",
                                max(rep.spin_to_bond_error, rep.bond_to_spin_error), 1e-10))
    for L in (2, 3):
        for b in SAMPLING_BETAS:
            checks.append(Check(f"plus = outer-spin conditional G{L}* beta={b:.4g}",
                                oracle.plus_conditional_error(L, b), 1e-10))
    for b in (1.0, 1.2):
        exact = oracle.enumerate_boltzmann(G3, b)
        checks.append(Check(f"dual route law G3 beta={b:.4g}",
                            oracle.tv_distance(oracle.dual_route_distribution(3, b), exact), 1e-10))
    G2 = build_square_lattice(2)
    for bc in ("free", "plus"):
        n_bad = sum(monotonicity_violations(G2, b, bc) for b in SAMPLING_BETAS)
        checks.append(Check(f"monotone coupling G2 {bc}", n_bad, 0))
    return checks


def sampling_checks(seed: int, n: int = N_SAMPLES, betas=SAMPLING_BETAS, branch="auto") -> list[Check]:
    G = build_square_lattice(3)
    checks = []
    for b in betas:
        exact = oracle.enumerate_boltzmann(G, b)
        batch = sample_batch(SamplerConfig(3, b, seed, branch), n)
        counts = oracle.empirical(state_indices(batch.spins), len(exact))
        stat, dof = oracle.chi_square(counts, exact)
        label = f"G3 beta={b:.4g} {batch.branch}"
        checks.append(Check(f"tv {label}", oracle.tv_distance(counts, exact), TV_THRESHOLD))
        checks.append(Check(f"chi2 {label} dof={dof}", stat, oracle.chi_square_critical(dof, CHI2_LEVEL)))
    return checks


def run_checks(level: str = "quick", seed: int = 20240601) -> list[Check]:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be quick or full, got {level!r}")
    checks = analytic_checks()
    if level == "full":
        checks += sampling_checks(seed)
    return checks
