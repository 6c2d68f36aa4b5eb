"""Random weighted tree environments with lazy, replayable growth.

An environment is a rooted tree with an extra virtual ancestor one level
above the root.  Every node except the ancestor carries the conductance of
the edge to its parent.  Children are realized on demand; the draws behind a
node's offspring count and edge conductances depend only on (seed, node id),
so any expansion order produces the same tree.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from .rng import MASK64

ANCESTOR = 0   # virtual ancestor, generation -1
ROOT = 1       # tree root, generation 0

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class OffspringLaw:
    """Finite offspring distribution on positive integers.

    probs maps k -> p_k.  Zero offspring is disallowed (the tree must have no
    leaves) and the mean must exceed one so the tree is infinite.
    """

    probs: tuple[tuple[int, float], ...]
    mean: float = field(init=False, compare=False)

    def __init__(self, probs):
        items = sorted(dict(probs).items())
        if not items:
            raise ValueError("offspring law needs at least one entry")
        for k, p in items:
            if not (isinstance(k, int) and k >= 1):
                raise ValueError(
                    f"offspring law must have no leaves and integer counts; got k={k}")
            if p < 0:
                raise ValueError(f"negative probability p_{k}={p}")
        total = math.fsum(p for _, p in items)
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"offspring probabilities sum to {total}, not 1")
        mean = math.fsum(k * p for k, p in items)
        if mean <= 1.0:
            raise ValueError(
                f"offspring mean {mean} <= 1: tree would die out (supercritical law required)")
        object.__setattr__(self, "probs", tuple(items))
        object.__setattr__(self, "mean", mean)

    @property
    def values(self) -> np.ndarray:
        return np.array([k for k, _ in self.probs], dtype=np.int64)

    @property
    def cum_weights(self) -> np.ndarray:
        return np.cumsum([p for _, p in self.probs])

    @property
    def max_offspring(self) -> int:
        return self.probs[-1][0]

    def moment(self, r: int) -> float:
        return math.fsum((k ** r) * p for k, p in self.probs)


@dataclass(frozen=True)
class ConductanceLaw:
    """Edge conductance law: value epsilon with probability alpha, otherwise a
    draw from the finite distribution mu1 on [1/kappa, kappa].

    mu1 must put positive weight on the value 1 exactly; epsilon must stay
    below 1/kappa so that "equals 1" and "is a mu1 value" are unambiguous.
    """

    alpha: float
    epsilon: float
    mu1: tuple[tuple[float, float], ...]
    kappa: float

    def __init__(self, alpha, epsilon, mu1, kappa):
        if not (0.0 <= alpha < 1.0):
            raise ValueError(f"alpha={alpha} outside [0, 1)")
        if kappa < 1.0:
            raise ValueError(f"kappa={kappa} must be >= 1")
        if not (0.0 < epsilon < 1.0 / kappa):
            raise ValueError(f"epsilon={epsilon} must lie in (0, 1/kappa)")
        items = sorted(dict(mu1).items())
        if not items:
            raise ValueError("mu1 needs at least one support value")
        for v, w in items:
            if not (1.0 / kappa <= v <= kappa):
                raise ValueError(f"mu1 value {v} outside [1/kappa, kappa]")
            if w < 0:
                raise ValueError(f"negative mu1 weight for value {v}")
        total = math.fsum(w for _, w in items)
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"mu1 weights sum to {total}, not 1")
        one_weight = dict(items).get(1.0, 0.0)
        if one_weight <= 0.0:
            raise ValueError("mu1 must give strictly positive weight to the value 1")
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "epsilon", float(epsilon))
        object.__setattr__(self, "mu1", tuple(items))
        object.__setattr__(self, "kappa", float(kappa))

    @property
    def value_table(self) -> np.ndarray:
        """Conductance value per integer code: code 0 is epsilon, 1.. are mu1."""
        return np.array([self.epsilon] + [v for v, _ in self.mu1], dtype=np.float64)

    @property
    def cum_weights(self) -> np.ndarray:
        mass = [self.alpha] + [(1.0 - self.alpha) * w for _, w in self.mu1]
        return np.cumsum(mass)

    @property
    def one_code(self) -> int:
        """Integer code of the conductance value 1 (atom detection is exact)."""
        for i, (v, _) in enumerate(self.mu1):
            if v == 1.0:
                return 1 + i
        raise AssertionError("unreachable: construction guarantees an atom at 1")

    def with_epsilon(self, epsilon: float) -> "ConductanceLaw":
        return ConductanceLaw(self.alpha, epsilon, self.mu1, self.kappa)


def sample_offspring(law: OffspringLaw, rng: np.random.Generator) -> int:
    """One offspring count distributed per the law."""
    u = rng.random()
    idx = int(np.searchsorted(law.cum_weights, u, side="right"))
    return int(law.values[min(idx, len(law.values) - 1)])


class Environment:
    """Lazily grown tree with per-edge conductance codes in a flat arena.

    Node 0 is the virtual ancestor (generation -1), node 1 the root.  A
    frozen environment (offspring=None) cannot grow: nodes without recorded
    children behave as childless, which makes finite hand-built trees — e.g.
    chains and truncations loaded from text — valid walk domains.
    """

    def __init__(self, offspring: OffspringLaw | None, conductance: ConductanceLaw,
                 seed: int, initial_capacity: int = 1024):
        self.offspring = offspring
        self.conductance = conductance
        self.seed = int(seed) & MASK64
        self.frozen = offspring is None
        cap = max(int(initial_capacity), 16)
        self._parent = np.empty(cap, np.int64)
        self._gen = np.empty(cap, np.int32)
        self._cond = np.empty(cap, np.int16)
        self._first_child = np.empty(cap, np.int64)
        self._n_child = np.empty(cap, np.int32)
        self._count = 2
        self._parent[0], self._gen[0], self._cond[0] = -1, -1, -1
        self._parent[1], self._gen[1] = 0, 0
        self._first_child[:2] = -1
        self._n_child[:2] = 0
        if self.frozen:
            self._off_vals = np.zeros(0, np.int64)
            self._off_cum = np.zeros(0, np.float64)
        else:
            self._off_vals = offspring.values
            self._off_cum = offspring.cum_weights
        self._cond_cum = conductance.cum_weights
        self._val_tab = conductance.value_table
        _k.seed_root_edge(self._cond, self._cond_cum, np.uint64(self.seed))

    # -------------------------------------------------------------- accessors

    @property
    def node_count(self) -> int:
        return self._count

    @property
    def one_code(self) -> int:
        return self.conductance.one_code

    @property
    def value_table(self) -> np.ndarray:
        return self._val_tab

    def _check_node(self, node: int) -> int:
        node = int(node)
        if not (0 <= node < self._count):
            raise ValueError(f"unknown node id {node}")
        return node

    def parent(self, node: int) -> int:
        node = self._check_node(node)
        if node == ANCESTOR:
            raise ValueError("virtual ancestor has no parent")
        return int(self._parent[node])

    def generation(self, node: int) -> int:
        return int(self._gen[self._check_node(node)])

    def is_expanded(self, node: int) -> bool:
        return self._first_child[self._check_node(node)] >= 0

    def edge_code(self, node: int) -> int:
        node = self._check_node(node)
        if node == ANCESTOR:
            raise ValueError("virtual ancestor has no parent edge")
        return int(self._cond[node])

    def edge_conductance(self, node: int) -> float:
        """Conductance of the edge from node to its parent."""
        return float(self._val_tab[self.edge_code(node)])

    def is_mu1_edge(self, node: int) -> bool:
        """True iff the parent edge carries a mu1 value (>= 1/kappa)."""
        return self.edge_code(node) >= 1

    # -------------------------------------------------------------- expansion

    def _grow(self, min_cap: int) -> None:
        cap = len(self._parent)
        if min_cap <= cap:
            return
        new_cap = cap
        while new_cap < min_cap:
            new_cap *= 2
        for name in ("_parent", "_gen", "_cond", "_first_child", "_n_child"):
            old = getattr(self, name)
            new = np.empty(new_cap, old.dtype)
            new[:cap] = old
            setattr(self, name, new)

    def _adopt(self, parent, gen, cond, first_child, n_child, count) -> None:
        # take over arrays handed back by a kernel (it may have reallocated)
        self._parent, self._gen, self._cond = parent, gen, cond
        self._first_child, self._n_child = first_child, n_child
        self._count = int(count)

    def ensure_children(self, node: int) -> list[int]:
        """Child ids of node, sampling them first if not yet realized.

        Idempotent; expanding twice returns the same ids.  On a frozen
        environment unrecorded children read as none (reflecting leaf).
        """
        node = self._check_node(node)
        if node == ANCESTOR:
            raise ValueError("virtual ancestor has no sampled children")
        fc = int(self._first_child[node])
        if fc >= 0:
            return list(range(fc, fc + int(self._n_child[node])))
        if self.frozen:
            return []
        self._grow(self._count + self.offspring.max_offspring)
        self._count = int(_k.expand_node(
            self._parent, self._gen, self._cond, self._first_child,
            self._n_child, self._count, self._off_vals, self._off_cum,
            self._cond_cum, np.uint64(self.seed), node))
        fc = int(self._first_child[node])
        return list(range(fc, fc + int(self._n_child[node])))

    def t1_survives_to_depth(self, node: int, h: int) -> bool:
        """Whether the subtree of node reached through mu1 edges only still has
        a descendant h generations further down (depth-first, early exit)."""
        if h < 0:
            raise ValueError("depth must be >= 0")
        node = self._check_node(node)
        if h == 0:
            return True
        target = self.generation(node) + h
        stack = [node]
        while stack:
            v = stack.pop()
            for c in self.ensure_children(v):
                if not self.is_mu1_edge(c):
                    continue
                if self.generation(c) >= target:
                    return True
                stack.append(c)
        return False

    # ------------------------------------------------------------ text format

    def export_text(self, freeze: bool = False) -> str:
        """Line-oriented dump: header with laws and seed, one node per line
        `id parent_id generation conductance`.  Round-trips bit-exactly.
        With freeze=True the offspring law is omitted, so the import is a
        finite snapshot that can no longer grow."""
        out = io.StringIO()
        out.write("# gwtwalk environment v1\n")
        out.write(f"# seed={self.seed}\n")
        if self.frozen or freeze:
            out.write("# offspring=none\n")
        else:
            pairs = ",".join(f"{k}:{p!r}" for k, p in self.offspring.probs)
            out.write(f"# offspring={pairs}\n")
        c = self.conductance
        out.write(f"# alpha={c.alpha!r}\n")
        out.write(f"# epsilon={c.epsilon!r}\n")
        out.write(f"# kappa={c.kappa!r}\n")
        out.write("# mu1=" + ",".join(f"{v!r}:{w!r}" for v, w in c.mu1) + "\n")
        out.write("# columns=id parent_id generation conductance\n")
        out.write("0 -1 -1 -\n")
        for i in range(1, self._count):
            out.write(f"{i} {self._parent[i]} {self._gen[i]} "
                      f"{float(self._val_tab[self._cond[i]])!r}\n")
        return out.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "Environment":
        header: dict[str, str] = {}
        rows: list[tuple[int, int, int, str]] = []
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    header[key.strip()] = val.strip()
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"line {ln}: expected 4 fields, got {len(parts)}")
            rows.append((int(parts[0]), int(parts[1]), int(parts[2]), parts[3]))
        for key in ("seed", "alpha", "epsilon", "kappa", "mu1", "offspring"):
            if key not in header:
                raise ValueError(f"header is missing '{key}'")
        mu1 = {}
        for item in header["mu1"].split(","):
            v, _, w = item.partition(":")
            mu1[float(v)] = float(w)
        cond = ConductanceLaw(float(header["alpha"]), float(header["epsilon"]),
                              mu1, float(header["kappa"]))
        if header["offspring"] == "none":
            off = None
        else:
            probs = {}
            for item in header["offspring"].split(","):
                k, _, p = item.partition(":")
                probs[int(k)] = float(p)
            off = OffspringLaw(probs)

        if len(rows) < 2:
            raise ValueError("environment needs at least the ancestor and the root")
        env = cls(off, cond, int(header["seed"]),
                  initial_capacity=max(16, len(rows)))
        n = len(rows)
        values = list(env._val_tab)
        for i, (nid, par, gen, cval) in enumerate(rows):
            if nid != i:
                raise ValueError(f"node ids must be dense and ordered; got {nid} at row {i}")
            if i == 0:
                if par != -1 or gen != -1 or cval != "-":
                    raise ValueError("row 0 must be the virtual ancestor: '0 -1 -1 -'")
                continue
            if not (0 <= par < i):
                raise ValueError(f"node {nid}: parent {par} must precede it")
            value = float(cval)
            try:
                code = values.index(value)
            except ValueError:
                raise ValueError(
                    f"node {nid}: conductance {cval} not in the law's support") from None
            if gen != rows[par][2] + 1:
                raise ValueError(f"node {nid}: generation {gen} != parent's + 1")
            env._grow(i + 1)
            env._parent[i] = par
            env._gen[i] = gen
            env._cond[i] = code
            env._first_child[i] = -1
            env._n_child[i] = 0
        env._count = n
        # recover child ranges; children of a node must be contiguous rows
        for i in range(1, n):
            par = int(env._parent[i])
            fc = int(env._first_child[par])
            if fc < 0:
                env._first_child[par] = i
                env._n_child[par] = 1
            else:
                if fc + int(env._n_child[par]) != i:
                    raise ValueError(
                        f"children of node {par} are not contiguous at row {i}")
                env._n_child[par] += 1
        return env
