"""Seed derivation and a counter-based uniform stream.

``counter_uniforms(seed, stream, index)`` is a pure function of its three
arguments, so draws for demand ``i`` do not depend on evaluation order or on
how demands are chunked across workers.
"""
import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _mix(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed: int, stream: int, index) -> np.ndarray:
    """Uniform doubles in [0, 1) keyed by (seed, stream, index)."""
    with np.errstate(over="ignore"):
        key = _mix(np.uint64(seed & _MASK) + _GOLDEN * np.uint64((stream + 1) & _MASK))
        idx = np.asarray(index, dtype=np.uint64)
        z = _mix(key + (idx + np.uint64(1)) * _GOLDEN)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Per-trial seed; XOR keeps it schedule-independent and cheap to recompute."""
    return (int(master_seed) ^ int(trial_index)) & _MASK


def child_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([int(seed) & _MASK, *keys]).generate_state(1, np.uint64)[0])


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))
