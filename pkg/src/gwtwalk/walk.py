"""Quenched random walk on an environment, plus trajectory statistics.

The walk at vertex v moves to a neighbor with probability proportional to
the conductance of the connecting edge (parent edge + realized child edges).
Arriving at an unexpanded vertex triggers expansion, so only the explored
part of the tree is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .env import ANCESTOR, ROOT, Environment


@dataclass
class Trajectory:
    """A finite walk path: visited node ids, their generations, and the
    conductance code of each traversed edge (-1 at the start entry)."""

    nodes: np.ndarray
    gens: np.ndarray
    codes: np.ndarray
    env: Environment

    @property
    def n_steps(self) -> int:
        return len(self.nodes) - 1

    @property
    def start(self) -> int:
        return int(self.nodes[0])

    def entry_conductances(self) -> np.ndarray:
        """Conductance of the edge traversed at each step; nan at index 0."""
        vals = np.empty(len(self.codes), dtype=np.float64)
        vals[0] = np.nan
        vals[1:] = self.env.value_table[self.codes[1:]]
        return vals

    def one_edge_mask(self) -> np.ndarray:
        """True where the entering edge has conductance exactly 1 (by code)."""
        return self.codes == self.env.one_code

    def export_text(self, stride: int = 1) -> str:
        """Stream of `generation entry_code` lines, optionally stride-thinned."""
        if stride < 1:
            raise ValueError("stride must be >= 1")
        lines = [f"# gwtwalk trajectory v1",
                 f"# steps={self.n_steps} stride={stride}",
                 "# columns=generation entry_code"]
        for i in range(0, len(self.gens), stride):
            lines.append(f"{self.gens[i]} {self.codes[i]}")
        return "\n".join(lines) + "\n"


def transition_distribution(env: Environment, v: int) -> list[tuple[int, float]]:
    """Neighbors of v with their one-step probabilities (sum to 1)."""
    v = int(v)
    if v == ANCESTOR:
        return [(ROOT, 1.0)]
    children = env.ensure_children(v)
    neighbors = [env.parent(v)] + children
    weights = [env.edge_conductance(v)] + [env.edge_conductance(c) for c in children]
    total = sum(weights)
    return [(u, w / total) for u, w in zip(neighbors, weights)]


def step(env: Environment, v: int, rng: np.random.Generator) -> int:
    """Sample the next vertex from the quenched transition law at v."""
    dist = transition_distribution(env, v)
    u = rng.random()
    acc = 0.0
    for node, p in dist:
        acc += p
        if u < acc:
            return node
    return dist[-1][0]


def run_walk(env: Environment, n_steps: int, walk_seed: int,
             start: int = ROOT) -> Trajectory:
    """Simulate n_steps of the walk from `start` using the draw stream
    identified by walk_seed.  A longer run with the same seed extends a
    shorter one step-for-step."""
    if n_steps < 0:
        raise ValueError("step count must be >= 0")
    start = int(start)
    if not (0 <= start < env.node_count):
        raise ValueError(f"unknown start node {start}")
    out_node = np.empty(n_steps + 1, np.int64)
    out_gen = np.empty(n_steps + 1, np.int32)
    out_code = np.empty(n_steps + 1, np.int16)
    arrays = _k.walk_kernel(
        env._parent, env._gen, env._cond, env._first_child, env._n_child,
        env._count, env._off_vals, env._off_cum, env._cond_cum, env._val_tab,
        np.uint64(env.seed), np.int64(start), np.int64(n_steps),
        np.uint64(int(walk_seed) & (2**64 - 1)), env.frozen,
        out_node, out_gen, out_code)
    env._adopt(*arrays)
    return Trajectory(out_node, out_gen, out_code, env)


def hitting_time_level(traj: Trajectory, k: int) -> int | None:
    """First step index at which the walk sits at generation k, if any."""
    hits = np.nonzero(traj.gens == k)[0]
    return int(hits[0]) if hits.size else None


def local_time(traj: Trajectory, v: int) -> int:
    """Number of time indices the trajectory spends at vertex v."""
    return int(np.count_nonzero(traj.nodes == int(v)))
