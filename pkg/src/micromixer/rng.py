"""Counter-based Gaussian noise keyed by (seed, particle, step).

Every Brownian increment is a pure function of its key, so results do not
depend on evaluation order or on how particles are split across workers.
The hash is SplitMix64's finaliser; two 53-bit uniforms feed a Box-Muller
transform that yields the x and y increments of one step.

``normal_pair`` (numpy, vectorised) and ``normal_pair_scalar`` (numba) are
bit-compatible.
"""

import numpy as np
from numba import njit

__all__ = ["splitmix64", "stream_key", "normal_pair", "normal_pair_scalar", "derive_seed"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_TWO_M53 = 2.0**-53


def splitmix64(z):
    # uint64 wraparound is the point; 0-d inputs would otherwise warn
    with np.errstate(over="ignore"):
        z = np.asarray(z, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_key(seed, particle_id):
    """Per-particle stream key."""
    return splitmix64(splitmix64(np.uint64(seed)) ^ np.asarray(particle_id, dtype=np.uint64))


def _uniform(h):
    # (0, 1]: never zero so log() is finite
    return ((h >> _S11).astype(np.float64) + 1.0) * _TWO_M53


def normal_pair(key, step):
    """Two independent standard normals per (key, step)."""
    base = splitmix64(np.asarray(key, dtype=np.uint64) ^ splitmix64(np.asarray(step, dtype=np.uint64)))
    u1 = _uniform(splitmix64(base))
    u2 = _uniform(splitmix64(base ^ _GOLDEN))
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return r * np.cos(theta), r * np.sin(theta)


@njit(cache=True, inline="always")
def _splitmix64_scalar(z):
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _uniform_scalar(h):
    return (np.float64(h >> np.uint64(11)) + 1.0) * 1.1102230246251565e-16


@njit(cache=True)
def normal_pair_scalar(key, step):
    base = _splitmix64_scalar(key ^ _splitmix64_scalar(np.uint64(step)))
    u1 = _uniform_scalar(_splitmix64_scalar(base))
    u2 = _uniform_scalar(_splitmix64_scalar(base ^ np.uint64(0x9E3779B97F4A7C15)))
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return r * np.cos(theta), r * np.sin(theta)


def derive_seed(seed, *indices):
    """Deterministic 63-bit child seed for a sweep grid point."""
    state = np.random.SeedSequence([int(seed), *map(int, indices)]).generate_state(1, np.uint64)[0]
    return int(state >> np.uint64(1))
