"""Counter-based random streams.

Every Monte Carlo trial owns a SplitMix64 stream keyed by
``trial_key(seed, i) = mix64(mix64(seed) ^ i)``.  Draw ``t`` of trial ``i`` is
``mix64(key_i + (t + 1) * GOLDEN)``, so a trial's stream is independent of
how trials are batched, ordered or split across workers.
"""
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def mix64(z):
    """SplitMix64 finalizer, vectorized over uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def trial_keys(seed, trials, offset=0):
    """Per-trial stream keys for trial indices ``offset .. offset + trials - 1``."""
    base = mix64(np.uint64(int(seed) & _MASK))
    idx = np.arange(offset, offset + trials, dtype=np.uint64)
    return mix64(base ^ idx)


def draw_bits(keys, t):
    """64 random bits per key for draw index ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(keys + (t + np.uint64(1)) * GOLDEN)


def draw_uniform(keys, t):
    """Uniform doubles in [0, 1) with 53 random bits."""
    return (draw_bits(keys, t) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def stream(seed, n, trial=0):
    """First ``n`` uniforms of a single trial's stream."""
    key = trial_keys(seed, 1, offset=trial)
    return draw_uniform(key[0], np.arange(n, dtype=np.uint64))


def subseed(seed, label):
    """Derive an independent integer seed for a named sub-experiment."""
    h = int(seed) & _MASK
    for ch in str(label).encode():
        h = int(mix64(np.uint64(h ^ ch)))
    return h
