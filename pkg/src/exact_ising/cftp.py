"""Monotone coupling from the past with epoch doubling.

Epoch t starts a bottom chain at all-minus and a top chain at all-plus at
time -(2^t - 1) and runs both to time 0; the update arriving at time s is
driven by ``schedule.draw(s)``. Because the schedule is counter-based,
every later epoch replays exactly the same randomness on the times it
shares with earlier ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .lattice import LatticeGraph
from .rng import RandomnessSchedule, schedule_draw, split_seed
from .spins import as_boundary, local_update, max_field, plus_probability_table

DEFAULT_MAX_UPDATES = 2**30


class CoalescenceCapExceeded(RuntimeError):
    """The chains did not coalesce within the allowed number of updates."""

    def __init__(self, updates_done: int, epochs_done: int, cap: int):
        self.updates_done = updates_done
        self.epochs_done = epochs_done
        self.cap = cap
        super().__init__(
            f"no coalescence after {epochs_done} epochs ({updates_done} updates); "
            f"next epoch would exceed the cap of {cap} updates"
        )


@dataclass
class CftpResult:
    sample: np.ndarray
    epochs_used: int
    total_updates: int


def epoch_updates(t: int) -> int:
    """Single-site updates spent in epoch t, counting both chains."""
    return 2 * ((1 << t) - 1)


@numba.njit(cache=True)
def _run_epoch(ptr, idx, defic, sign, table, offset, k0, k1, t, bottom, top, check):
    n = bottom.shape[0]
    bottom[:] = -1
    top[:] = 1
    start = (np.int64(1) << t) - 1
    for s in range(-start + 1, 1):
        v, u = schedule_draw(s, n, k0, k1)
        local_update(ptr, idx, defic, sign, table, offset, bottom, v, u)
        local_update(ptr, idx, defic, sign, table, offset, top, v, u)
        if check and bottom[v] > top[v]:
            return False
    return True


@numba.njit(cache=True)
def _cftp(ptr, idx, defic, sign, table, offset, k0, k1, min_epoch, max_epoch,
          max_updates, check, out):
    """Returns (epochs, updates, status); status 0 ok, 1 capped, 2 sandwich broken."""
    n = out.shape[0]
    bottom = np.empty(n, dtype=np.int8)
    top = np.empty(n, dtype=np.int8)
    updates = 0
    t = min_epoch
    while True:
        cost = 2 * ((np.int64(1) << t) - 1)
        if t > max_epoch or updates + cost > max_updates:
            return t - 1, updates, 1
        if not _run_epoch(ptr, idx, defic, sign, table, offset, k0, k1, t, bottom, top, check):
            return t, updates + cost, 2
        updates += cost
        same = True
        for i in range(n):
            if bottom[i] != top[i]:
                same = False
                break
        if same:
            out[:] = bottom
            return t, updates, 0
        t += 1


@numba.njit(cache=True)
def _cftp_batch(ptr, idx, defic, sign, table, offset, keys, min_epoch, max_epoch,
                max_updates, out, epochs, updates, status):
    for i in range(keys.shape[0]):
        e, u, s = _cftp(ptr, idx, defic, sign, table, offset, keys[i, 0], keys[i, 1],
                        min_epoch, max_epoch, max_updates, False, out[i])
        epochs[i] = e
        updates[i] = u
        status[i] = s


def _kernel_args(G: LatticeGraph, beta: float, bc):
    if G.vertex_count < 1:
        raise ValueError("CFTP needs at least one vertex")
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    offset = max_field(G)
    table = plus_probability_table(beta, offset)
    return (G.nbr_ptr, G.nbr_idx, G.boundary_deficiency, np.int64(as_boundary(bc).sign),
            table, np.int64(offset))


def run_epoch(G: LatticeGraph, beta: float, bc, schedule: RandomnessSchedule, t: int):
    """Bottom and top chain states at time 0 when started at time -(2^t - 1)."""
    args = _kernel_args(G, beta, bc)
    bottom = np.empty(G.vertex_count, dtype=np.int8)
    top = np.empty(G.vertex_count, dtype=np.int8)
    _run_epoch(*args, schedule.key[0], schedule.key[1], np.int64(t), bottom, top, False)
    return bottom, top


def coalesced(bottom: np.ndarray, top: np.ndarray) -> bool:
    if len(bottom) != len(top):
        raise ValueError(f"length mismatch: {len(bottom)} vs {len(top)}")
    return bool(np.array_equal(bottom, top))


def cftp_sample(G: LatticeGraph, beta: float, bc, schedule: RandomnessSchedule,
                max_updates: int = DEFAULT_MAX_UPDATES, max_epoch: int | None = None,
                min_epoch: int = 1, check_sandwich: bool = False) -> CftpResult:
    """Exact sample from the Boltzmann measure of ``G`` with boundary ``bc``.

    Parameters
    ----------
    G : LatticeGraph
    beta : float
        Inverse temperature.
    bc : {"free", "plus", "minus"}
    schedule : RandomnessSchedule
        Must be keyed for ``G.vertex_count`` vertices.
    max_updates : int
        Cap on the total single-site updates over all epochs. An epoch that
        would cross it is not started.
    max_epoch : int, optional
        Last epoch allowed to run.
    min_epoch : int
        First epoch tried. Starting deeper than needed returns the same
        sample, which is the defining property of CFTP.
    check_sandwich : bool
        Verify bottom <= top after every update.

    Raises
    ------
    CoalescenceCapExceeded
    """
    if schedule.n_vertices != G.vertex_count:
        raise ValueError("schedule was keyed for a different vertex count")
    if min_epoch < 1:
        raise ValueError("min_epoch must be >= 1")
    args = _kernel_args(G, beta, bc)
    out = np.empty(G.vertex_count, dtype=np.int8)
    max_epoch = 62 if max_epoch is None else max_epoch
    epochs, updates, status = _cftp(*args, schedule.key[0], schedule.key[1], np.int64(min_epoch),
                                    np.int64(max_epoch), np.int64(max_updates), check_sandwich, out)
    if status == 1:
        raise CoalescenceCapExceeded(int(updates), int(epochs), int(max_updates))
    if status == 2:
        raise AssertionError("sandwich invariant violated: bottom chain rose above top chain")
    return CftpResult(out, int(epochs), int(updates))


def cftp_batch(G: LatticeGraph, beta: float, bc, seeds, max_updates: int = DEFAULT_MAX_UPDATES,
               max_epoch: int | None = None):
    """Vectorised :func:`cftp_sample` over many seeds.

    Returns ``(samples, epochs, updates, capped)``; rows for capped seeds hold
    undefined spins.
    """
    args = _kernel_args(G, beta, bc)
    keys = np.array([split_seed(s) for s in seeds], dtype=np.uint64).reshape(-1, 2)
    n = len(keys)
    out = np.empty((n, G.vertex_count), dtype=np.int8)
    epochs = np.empty(n, dtype=np.int64)
    updates = np.empty(n, dtype=np.int64)
    status = np.empty(n, dtype=np.int64)
    max_epoch = 62 if max_epoch is None else max_epoch
    _cftp_batch(*args, keys, np.int64(1), np.int64(max_epoch), np.int64(max_updates),
                out, epochs, updates, status)
    return out, epochs, updates, status == 1
