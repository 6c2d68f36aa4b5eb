"""Exact electrical-network computations on finite tree truncations.

A truncation is the tree realized down to a fixed level k, with the level-k
vertices forming the absorbing boundary.  The effective conductance from the
root to the boundary is a series/parallel fold; combined with the ancestor
edge it gives the exact probability of returning to the virtual ancestor
before reaching the boundary.  A sparse linear solve of the harmonic system
provides the same quantities by an independent route and doubles as the
oracle Monte Carlo runs are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import _kernels as _k
from .env import ANCESTOR, ROOT, Environment

ConductanceValue = float   # nonnegative, math.inf allowed (zero resistance)


@dataclass
class Truncation:
    """Fully realized tree between the virtual ancestor and generation `level`.

    Plain arrays (node 0 = ancestor, node 1 = root): parent id, generation,
    contiguous child range, and the conductance *value* of each node's parent
    edge (nan at node 0).  Values are materialized floats, so a truncation can
    be perturbed freely without touching any law bookkeeping.
    """

    parent: np.ndarray
    gen: np.ndarray
    first_child: np.ndarray
    n_child: np.ndarray
    value: np.ndarray
    level: int
    header: tuple[str, ...] = ()

    @property
    def node_count(self) -> int:
        return len(self.parent)

    def boundary_nodes(self) -> np.ndarray:
        return np.nonzero(self.gen == self.level)[0]

    def children(self, v: int) -> range:
        fc = int(self.first_child[v])
        return range(fc, fc + int(self.n_child[v])) if fc >= 0 else range(0)

    @classmethod
    def from_env(cls, env: Environment, level: int,
                 max_nodes: int = 2_000_000) -> "Truncation":
        """Expand env down to `level` and snapshot it.  Nodes the walk may
        have realized below the level are left out of the snapshot."""
        if level < 1:
            raise ValueError("level must be >= 1")
        ids = [ANCESTOR, ROOT]
        qi = 1
        while qi < len(ids):
            v = ids[qi]
            qi += 1
            if env.generation(v) < level:
                kids = env.ensure_children(v)
                if not kids and env.frozen:
                    raise ValueError(
                        f"frozen environment is not realized down to level {level}")
                ids.extend(kids)
                if len(ids) > max_nodes:
                    raise ValueError(
                        f"truncation would exceed {max_nodes} nodes")
        n = len(ids)
        remap = {old: new for new, old in enumerate(ids)}
        parent = np.empty(n, np.int64)
        gen = np.empty(n, np.int32)
        value = np.empty(n, np.float64)
        first_child = np.full(n, -1, np.int64)
        n_child = np.zeros(n, np.int32)
        parent[0], gen[0], value[0] = -1, -1, np.nan
        for new in range(1, n):
            old = ids[new]
            parent[new] = remap[env.parent(old)]
            gen[new] = env.generation(old)
            value[new] = env.edge_conductance(old)
        for new in range(1, n):
            p = int(parent[new])
            if first_child[p] < 0:
                first_child[p] = new    # children are BFS-contiguous
            n_child[p] += 1
        header = tuple(line[2:] for line in env.export_text().splitlines()
                       if line.startswith("# ") and "=" in line)
        return cls(parent, gen, first_child, n_child, value, int(level), header)

    @classmethod
    def from_text(cls, text: str) -> "Truncation":
        """Read a truncation from the environment text format; the deepest
        generation present becomes the boundary level."""
        env = Environment.from_text(text)
        level = max(env.generation(v) for v in range(env.node_count))
        if level < 1:
            raise ValueError("truncation text contains no vertices below the root")
        return cls.from_env(env, level)

    def export_text(self) -> str:
        """Dump in the environment text format (header plus node rows)."""
        lines = ["# gwtwalk environment v1"]
        lines += [f"# {item}" for item in self.header]
        lines.append("0 -1 -1 -")
        for i in range(1, self.node_count):
            lines.append(f"{i} {self.parent[i]} {self.gen[i]} {float(self.value[i])!r}")
        return "\n".join(lines) + "\n"

    def with_scaled_edge(self, node: int, factor: float) -> "Truncation":
        """Copy of the truncation with one parent-edge conductance scaled."""
        if not (1 <= node < self.node_count):
            raise ValueError("node must have a parent edge")
        value = self.value.copy()
        value[node] *= factor
        return Truncation(self.parent, self.gen, self.first_child,
                          self.n_child, value, self.level, self.header)


def combine_series(c1: ConductanceValue, c2: ConductanceValue) -> ConductanceValue:
    """Conductance of two edges in series; inf acts as identity, 0 absorbs."""
    if c1 < 0 or c2 < 0:
        raise ValueError("conductances must be >= 0")
    if math.isinf(c1):
        return c2
    if math.isinf(c2):
        return c1
    if c1 == 0.0 or c2 == 0.0:
        return 0.0
    return c1 * c2 / (c1 + c2)


def combine_parallel(cs) -> ConductanceValue:
    """Conductance of parallel branches: plain sum (0 for no branches)."""
    total = 0.0
    for c in cs:
        if c < 0:
            raise ValueError("conductances must be >= 0")
        total += c
    return total


def effective_conductance_to_level(trunc: Truncation, frm: int = ROOT) -> ConductanceValue:
    """Effective conductance between `frm` and the boundary level, by
    bottom-up series/parallel folding (boundary vertices count as inf)."""
    frm = int(frm)
    if trunc.gen[frm] >= trunc.level:
        raise ValueError("nothing between vertex and boundary")
    c = np.zeros(trunc.node_count, np.float64)
    c[trunc.gen == trunc.level] = math.inf
    for v in range(trunc.node_count - 1, -1, -1):
        if trunc.gen[v] >= trunc.level:
            continue
        acc = 0.0
        for ch in trunc.children(v):
            acc += combine_series(float(trunc.value[ch]), float(c[ch]))
        c[v] = acc
        if v == frm:
            break
    return float(c[frm])


def return_probability_before_level(trunc: Truncation) -> float:
    """Exact probability that the walk started at the root visits the virtual
    ancestor before the boundary level."""
    xi = float(trunc.value[ROOT])
    c = effective_conductance_to_level(trunc, ROOT)
    return xi / (xi + c)


def solve_absorbing_chain(trunc: Truncation, absorb_top: bool = True) -> np.ndarray:
    """Per-vertex probability of hitting the virtual ancestor before the
    boundary (absorb_top=True), or the complementary event (False), via a
    sparse solve of the harmonic system.  Residual is verified < 1e-12."""
    n = trunc.node_count
    if n > 100_000:
        raise ValueError(f"truncation too large for the solver: {n} nodes")
    is_boundary = trunc.gen == trunc.level
    interior = np.nonzero(~is_boundary)[0]
    interior = interior[interior != ANCESTOR]
    index = {int(v): i for i, v in enumerate(interior)}
    m = len(interior)
    h = np.zeros(n, np.float64)
    h[ANCESTOR] = 1.0 if absorb_top else 0.0
    h[is_boundary] = 0.0 if absorb_top else 1.0

    rows, cols, vals = [], [], []
    rhs = np.zeros(m, np.float64)
    for i, v in enumerate(interior):
        v = int(v)
        neighbors = [(int(trunc.parent[v]), float(trunc.value[v]))]
        neighbors += [(ch, float(trunc.value[ch])) for ch in trunc.children(v)]
        total = sum(w for _, w in neighbors)
        rows.append(i)
        cols.append(i)
        vals.append(total)
        for u, w in neighbors:
            if u in index:
                rows.append(i)
                cols.append(index[u])
                vals.append(-w)
            else:
                rhs[i] += w * h[u]
    mat = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(m, m))
    h[interior] = scipy.sparse.linalg.spsolve(mat, rhs)

    residual = 0.0
    for v in interior:
        v = int(v)
        neighbors = [(int(trunc.parent[v]), float(trunc.value[v]))]
        neighbors += [(ch, float(trunc.value[ch])) for ch in trunc.children(v)]
        total = sum(w for _, w in neighbors)
        avg = sum(w * h[u] for u, w in neighbors) / total
        residual = max(residual, abs(h[v] - avg))
    if residual >= 1e-12:
        raise RuntimeError(f"solver failed: residual {residual:.3e} >= 1e-12")
    return h


def escape_probability_estimate(env: Environment, k_max: int) -> tuple[float, list[float]]:
    """Escape probability (never returning to the ancestor) bracketed by its
    finite-level values: returns the level-k_max estimate together with the
    whole non-increasing sequence for k = 1..k_max."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    seq = []
    for k in range(1, k_max + 1):
        trunc = Truncation.from_env(env, k)
        seq.append(1.0 - return_probability_before_level(trunc))
    return seq[-1], seq


def monte_carlo_return_fraction(trunc: Truncation, n_walks: int, seed: int,
                                start: int = ROOT) -> float:
    """Empirical fraction of walks on the truncation that reach the virtual
    ancestor before the boundary; companion check for the exact values."""
    hits = _k.absorb_hits_kernel(
        trunc.parent, trunc.first_child, trunc.n_child, trunc.gen,
        trunc.value, np.int32(trunc.level), np.int64(start),
        np.int64(n_walks), np.uint64(int(seed) & (2**64 - 1)))
    return float(hits) / float(n_walks)
