"""Exact sampling for the two-dimensional Ising model at every temperature."""

from .cftp import CftpResult, CoalescenceCapExceeded, RandomnessSchedule, cftp_sample, coalesced
from .lattice import DualMap, LatticeGraph, build_dual, build_square_lattice
from .oracle import DistributionTable, enumerate_boltzmann, enumerate_rc, es_joint_check, tv_distance
from .random_cluster import (beta_to_p, connected_components, dual_beta, dual_p, dual_rc_state,
                             ising_to_rc, p_to_beta, rc_to_ising, rc_weight)
from .rng import KeyedStream
from .sampler import SamplerConfig, describe, run_sampler, sample_batch, sample_ising
from .spins import (BETA_C, Boundary, agreement_counts, heat_bath_update, plus_probability,
                    unnormalized_weight)

__version__ = "0.1.0"

__all__ = [
    "BETA_C", "Boundary", "CftpResult", "CoalescenceCapExceeded", "DistributionTable", "DualMap",
    "KeyedStream", "LatticeGraph", "RandomnessSchedule", "SamplerConfig", "agreement_counts",
    "beta_to_p", "build_dual", "build_square_lattice", "cftp_sample", "coalesced",
    "connected_components", "describe", "dual_beta", "dual_p", "dual_rc_state",
    "enumerate_boltzmann", "enumerate_rc", "es_joint_check", "heat_bath_update", "ising_to_rc",
    "p_to_beta", "plus_probability", "rc_to_ising", "rc_weight", "run_sampler", "sample_batch",
    "sample_ising", "tv_distance", "unnormalized_weight",
]
