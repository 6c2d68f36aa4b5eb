"""Thin Python-facing wrappers around the compiled hash-based RNG.

The scheme is counter-based: a 64-bit key identifies a stream, draw j of the
stream is a pure function of (key, j).  Streams never carry mutable state, so
replicas, nodes and walks can be evaluated in any order — or in parallel —
without changing a single draw.
"""

import numpy as np

from . import _kernels as _k

MASK64 = (1 << 64) - 1

TAG_ENV = 1      # per-replica environment seeds
TAG_WALK = 2     # per-replica walk streams
TAG_BOOT = 3     # bootstrap resampling
TAG_MC = 4       # Monte Carlo cross-checks


def mix64(x: int) -> int:
    return int(_k.mix64(np.uint64(x & MASK64)))


def derive_key(seed: int, tag: int) -> int:
    """Independent substream seed for (seed, tag); composable by chaining."""
    return int(_k.derive_key(np.uint64(seed & MASK64), np.uint64(tag & MASK64)))


def node_key(env_seed: int, node: int) -> int:
    return int(_k.node_key(np.uint64(env_seed & MASK64), np.uint64(node)))


def stream_u01(key: int, j: int) -> float:
    """Draw j of the stream `key`, uniform in [0, 1)."""
    return float(_k.stream_u01(np.uint64(key & MASK64), np.uint64(j)))


def replica_keys(master_seed: int, replica: int) -> tuple[int, int]:
    """(environment seed, walk stream key) for one replica of an experiment."""
    env = derive_key(derive_key(master_seed, TAG_ENV), replica)
    walk = derive_key(derive_key(master_seed, TAG_WALK), replica)
    return env, walk
