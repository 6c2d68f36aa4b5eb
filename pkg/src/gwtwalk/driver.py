"""Replica fan-out for Monte Carlo experiments.

One environment and one walk stream per replica, both derived from the
master seed and the replica index alone — results are therefore identical
for any thread count, and replicas are merged in index order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, TypeVar

import numpy as np

from .env import ConductanceLaw, Environment, OffspringLaw
from .regen import confirm_regenerations, increments
from .walk import Trajectory, run_walk
from .rng import replica_keys

T = TypeVar("T")


def map_replicas(fn: Callable[[int], T], replicas: int, threads: int = 1) -> list[T]:
    """fn(replica_index) for each replica, merged in index order."""
    if threads <= 1 or replicas <= 1:
        return [fn(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(replicas)))


def replica_walk(offspring: OffspringLaw, conductance: ConductanceLaw,
                 steps: int, seed: int, replica: int) -> Trajectory:
    """Fresh environment and walk for one replica of an experiment."""
    env_seed, walk_key = replica_keys(seed, replica)
    env = Environment(offspring, conductance, env_seed)
    return run_walk(env, steps, walk_key)


@dataclass
class IncrementRun:
    """Pooled regeneration increments from a set of independent replicas."""

    dtau: np.ndarray
    dd: np.ndarray
    final_gens: np.ndarray       # |X_n| per replica
    regen_counts: np.ndarray     # confirmed regenerations per replica
    steps: int
    replicas: int
    margin: int
    seed: int
    trace: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def pairs(self) -> int:
        return len(self.dtau)


def run_increments(offspring: OffspringLaw, conductance: ConductanceLaw, *,
                   steps: int, replicas: int, margin: int, seed: int,
                   threads: int = 1, keep_trace: bool = False,
                   trace_points: int = 2000) -> IncrementRun:
    """Run `replicas` independent walks of `steps` steps, confirm
    regenerations with the given margin, and pool the increment pairs."""

    def one(replica: int):
        traj = replica_walk(offspring, conductance, steps, seed, replica)
        record = confirm_regenerations(traj, margin)
        if len(record) >= 4:
            sample = increments(record)
            dtau, dd = sample.dtau, sample.dd
        else:
            dtau = np.zeros(0, np.int64)
            dd = np.zeros(0, np.int64)
        trace = None
        if keep_trace and replica == 0:
            stride = max(1, len(traj.gens) // trace_points)
            idx = np.arange(0, len(traj.gens), stride)
            trace = (idx, traj.gens[idx].astype(np.int64))
        return dtau, dd, int(traj.gens[-1]), len(record), trace

    results = map_replicas(one, replicas, threads)
    return IncrementRun(
        dtau=np.concatenate([r[0] for r in results]),
        dd=np.concatenate([r[1] for r in results]),
        final_gens=np.array([r[2] for r in results], np.int64),
        regen_counts=np.array([r[3] for r in results], np.int64),
        steps=int(steps), replicas=int(replicas), margin=int(margin),
        seed=int(seed), trace=results[0][4])
