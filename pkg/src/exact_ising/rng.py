"""Counter-based randomness.

Every random number used by the samplers is a pure function of
``(seed, stream, counter)``, computed with the Philox4x64-10 block cipher.
Nothing is stored between calls, so re-reading the draw for a time index
that was already visited costs nothing and is bit-identical by
construction.
"""

from __future__ import annotations

import numba
import numpy as np

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

#: sub-stream ids of a master seed
STREAM_CFTP = 0
STREAM_BONDS = 1
STREAM_CLUSTER_SPINS = 2

_MASK64 = (1 << 64) - 1


@numba.njit(cache=True, inline="always")
def _mulhilo(a, b):
    a_lo = a & _LO32
    a_hi = a >> _S32
    b_lo = b & _LO32
    b_hi = b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid = (ll >> _S32) + (lh & _LO32) + (hl & _LO32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    return hi, a * b


@numba.njit(cache=True)
def philox4x64(c0, c1, c2, c3, k0, k1):
    """Philox4x64 with 10 rounds; returns the four output words."""
    for r in range(10):
        if r > 0:
            k0 = k0 + _W0
            k1 = k1 + _W1
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


@numba.njit(cache=True, inline="always")
def to_unit(x):
    """Top 53 bits of a 64-bit word as a double in [0, 1)."""
    return float(x >> _S11) * _INV53


@numba.njit(cache=True)
def _uniforms(counters, stream, k0, k1, out):
    zero = np.uint64(0)
    s = np.uint64(stream)
    for i in range(counters.shape[0]):
        w0, w1, w2, w3 = philox4x64(np.uint64(counters[i]), s, zero, zero, k0, k1)
        out[i] = to_unit(w0)


def split_seed(seed: int) -> tuple[np.uint64, np.uint64]:
    """Map a nonnegative seed of up to 128 bits onto the two Philox key words."""
    seed = int(seed)
    if seed < 0 or seed >> 128:
        raise ValueError(f"seed must be in [0, 2**128), got {seed}")
    return np.uint64(seed & _MASK64), np.uint64(seed >> 64)


class KeyedStream:
    """Uniform variates indexed by an integer counter on one sub-stream of a seed.

    ``uniforms(idx)[i]`` depends only on ``(seed, stream, idx[i])``.
    """

    def __init__(self, seed: int, stream: int):
        self.seed = int(seed)
        self.stream = int(stream)
        self._key = split_seed(seed)

    def uniforms(self, counters) -> np.ndarray:
        counters = np.asarray(counters, dtype=np.uint64).ravel()
        out = np.empty(counters.shape[0], dtype=np.float64)
        _uniforms(counters, self.stream, self._key[0], self._key[1], out)
        return out

    def __repr__(self) -> str:
        return f"KeyedStream(seed={self.seed}, stream={self.stream})"


@numba.njit(cache=True, inline="always")
def schedule_draw(t, n_vertices, k0, k1):
    """The (vertex, uniform) pair driving the update that arrives at time ``t <= 0``."""
    zero = np.uint64(0)
    w0, w1, w2, w3 = philox4x64(np.uint64(-t), np.uint64(STREAM_CFTP), zero, zero, k0, k1)
    v = int(to_unit(w0) * n_vertices)
    return v, to_unit(w1)


@numba.njit(cache=True)
def _schedule_draws(times, n_vertices, k0, k1, vs, us):
    for i in range(times.shape[0]):
        vs[i], us[i] = schedule_draw(times[i], n_vertices, k0, k1)


class RandomnessSchedule:
    """Deterministic map from a time index ``t <= 0`` to one heat-bath update.

    One Philox block per time index: word 0 picks the vertex via
    ``floor(u1 * N)``, word 1 is the uniform ``u`` compared against the
    conditional plus probability.

    >>> s = RandomnessSchedule(seed=1, n_vertices=9)
    >>> s.draw(-5) == s.draw(-5)
    True
    """

    def __init__(self, seed: int, n_vertices: int):
        if n_vertices < 1:
            raise ValueError("schedule needs at least one vertex")
        self.seed = int(seed)
        self.n_vertices = int(n_vertices)
        self.key = split_seed(seed)

    def draw(self, t: int) -> tuple[int, float]:
        if t > 0:
            raise ValueError(f"time index must be <= 0, got {t}")
        v, u = schedule_draw(int(t), self.n_vertices, self.key[0], self.key[1])
        return int(v), float(u)

    def draws(self, times) -> tuple[np.ndarray, np.ndarray]:
        times = np.asarray(times, dtype=np.int64).ravel()
        if times.size and times.max() > 0:
            raise ValueError("time indices must be <= 0")
        vs = np.empty(times.shape[0], dtype=np.int64)
        us = np.empty(times.shape[0], dtype=np.float64)
        _schedule_draws(times, self.n_vertices, self.key[0], self.key[1], vs, us)
        return vs, us

    def __repr__(self) -> str:
        return f"RandomnessSchedule(seed={self.seed}, n_vertices={self.n_vertices})"
