"""Compiled numerical core: hashing RNG, lazy tree expansion, walk simulation.

All randomness is counter-based splitmix64-style hashing.  Every node of the
tree owns an independent draw stream keyed by (environment seed, node id), so
the sampled offspring counts and edge conductances do not depend on the order
in which nodes get expanded.  Walks own a separate stream keyed by a walk
seed, one uniform draw per step, which makes a longer run a bit-exact
extension of a shorter one.

Everything here manipulates uint64 state.  Seeds and states crossing the
Python/numba boundary MUST be wrapped in np.uint64 by the caller: a bare
Python int is inferred as int64 and silently corrupts the draw sequence.
The public wrappers in rng.py and env.py take care of this.
"""

import numpy as np
from numba import njit, uint64, float64

_U = np.uint64

GAMMA = _U(0x9E3779B97F4A7C15)
K_NODE = _U(0xD1B54A32D192ED03)
K_STREAM = _U(0x8CB92BA72F3D8DD7)
_INV_2_53 = 2.0 ** -53


@njit(uint64(uint64), cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


@njit(uint64(uint64, uint64), cache=True, inline="always")
def derive_key(seed, tag):
    """Independent 64-bit substream seed for (seed, tag)."""
    return mix64(seed ^ mix64((tag + _U(1)) * K_STREAM))


@njit(uint64(uint64, uint64), cache=True, inline="always")
def node_key(env_seed, node):
    return mix64(env_seed ^ mix64((node + _U(1)) * K_NODE))


@njit(float64(uint64, uint64), cache=True, inline="always")
def stream_u01(key, j):
    """j-th uniform draw of the stream identified by key, in [0, 1)."""
    return (mix64(key + j * GAMMA) >> _U(11)) * _INV_2_53


@njit(cache=True, inline="always")
def _pick_cdf(cum, u):
    # inverse CDF over a short cumulative-weight table
    i = 0
    while u >= cum[i] and i < cum.shape[0] - 1:
        i += 1
    return i


@njit(cache=True)
def expand_node(parent, gen, cond, first_child, n_child, count,
                off_vals, off_cum, cond_cum, env_seed, node):
    """Realize the children of `node` in the arena; returns the new node count.

    No-op (returns count unchanged) if the node is already expanded.  The
    caller must guarantee capacity for max-offspring extra rows.  Draw 0 of
    the node's stream selects the offspring count, draws 1..k the edge
    conductance codes of the children in order.
    """
    if first_child[node] >= 0:
        return count
    key = node_key(env_seed, _U(node))
    k = off_vals[_pick_cdf(off_cum, stream_u01(key, _U(0)))]
    first_child[node] = count
    n_child[node] = k
    g = gen[node] + 1
    for i in range(k):
        c = count + i
        parent[c] = node
        gen[c] = g
        cond[c] = _pick_cdf(cond_cum, stream_u01(key, _U(1 + i)))
        first_child[c] = -1
        n_child[c] = 0
    return count + k


@njit(cache=True)
def seed_root_edge(cond, cond_cum, env_seed):
    """Sample the conductance code of the root's ancestor edge (node 1).

    The virtual ancestor (node 0) has no offspring draw; its stream's draw 0
    is reserved for this single edge.
    """
    key = node_key(env_seed, _U(0))
    cond[1] = _pick_cdf(cond_cum, stream_u01(key, _U(0)))


@njit(cache=True, nogil=True)
def walk_kernel(parent, gen, cond, first_child, n_child, count,
                off_vals, off_cum, cond_cum, val_tab, env_seed,
                start, n_steps, walk_key, frozen,
                out_node, out_gen, out_code):
    """Run n_steps of the conductance-weighted walk, expanding lazily.

    Writes the visited node id, its generation and the code of the traversed
    edge (-1 at index 0) into the out arrays, which must have length
    n_steps + 1.  Returns the (possibly reallocated) arena arrays plus the
    new node count.  In a frozen environment unexpanded nodes act as
    reflecting leaves instead of being expanded.
    """
    cap = parent.shape[0]
    max_off = 0
    for i in range(off_vals.shape[0]):
        if off_vals[i] > max_off:
            max_off = off_vals[i]

    v = start
    out_node[0] = v
    out_gen[0] = gen[v]
    out_code[0] = -1

    for step in range(1, n_steps + 1):
        if v == 0:
            # virtual ancestor: single neighbor, the root
            v = 1
            out_node[step] = 1
            out_gen[step] = gen[1]
            out_code[step] = cond[1]
            continue

        if first_child[v] < 0 and not frozen:
            if count + max_off > cap:
                new_cap = 2 * cap
                while count + max_off > new_cap:
                    new_cap *= 2
                np_parent = np.empty(new_cap, np.int64)
                np_gen = np.empty(new_cap, np.int32)
                np_cond = np.empty(new_cap, np.int16)
                np_fc = np.empty(new_cap, np.int64)
                np_nc = np.empty(new_cap, np.int32)
                np_parent[:cap] = parent
                np_gen[:cap] = gen
                np_cond[:cap] = cond
                np_fc[:cap] = first_child
                np_nc[:cap] = n_child
                parent, gen, cond = np_parent, np_gen, np_cond
                first_child, n_child = np_fc, np_nc
                cap = new_cap
            count = expand_node(parent, gen, cond, first_child, n_child,
                                count, off_vals, off_cum, cond_cum,
                                env_seed, v)

        fc = first_child[v]
        k = n_child[v] if fc >= 0 else 0
        w_up = val_tab[cond[v]]
        total = w_up
        for i in range(k):
            total += val_tab[cond[fc + i]]

        u = stream_u01(walk_key, _U(step)) * total
        if u < w_up:
            nxt = parent[v]
            code = cond[v]
        else:
            acc = w_up
            nxt = fc + k - 1          # fallback guards float round-off
            code = cond[nxt]
            for i in range(k):
                c = fc + i
                acc += val_tab[cond[c]]
                if u < acc:
                    nxt = c
                    code = cond[c]
                    break
        v = nxt
        out_node[step] = v
        out_gen[step] = gen[v]
        out_code[step] = code

    return parent, gen, cond, first_child, n_child, count


@njit(cache=True, nogil=True)
def absorb_hits_kernel(parent, first_child, n_child, gen, value,
                       level, start, n_walks, walks_key):
    """Count walks (out of n_walks) that reach node 0 before generation `level`.

    Operates on a fully realized truncation with explicit per-node edge
    values.  Each walk gets its own derived draw stream, so the count does
    not depend on how walks are batched.
    """
    hits = 0
    for w in range(n_walks):
        key = derive_key(walks_key, _U(w))
        v = start
        j = _U(0)
        while True:
            if v == 0:
                hits += 1
                break
            if gen[v] == level:
                break
            fc = first_child[v]
            k = n_child[v] if fc >= 0 else 0
            w_up = value[v]
            total = w_up
            for i in range(k):
                total += value[fc + i]
            j += _U(1)
            u = stream_u01(key, j) * total
            if u < w_up:
                v = parent[v]
            else:
                acc = w_up
                nxt = fc + k - 1
                for i in range(k):
                    c = fc + i
                    acc += value[c]
                    if u < acc:
                        nxt = c
                        break
                v = nxt
    return hits


@njit(cache=True, nogil=True)
def potential_regen_kernel(gens, is_one):
    """Candidate regeneration times of a trajectory.

    A candidate is a step n at a strict fresh-maximum generation g entered
    through a conductance-1 edge.  After emitting a candidate, later
    fresh-maximum times are suppressed until the walk first drops to g-1;
    if that drop never happens within the window, the scan resumes from the
    step right after the candidate (suppressed times would be contradicted
    by the very drop that defines the gate, so this keeps every confirmable
    time in the candidate list).
    """
    n = gens.shape[0]
    out = np.empty(n, np.int64)
    m = 0
    # suffix minimum of generations; sentinel +inf past the end
    suf_min = np.empty(n + 1, np.int64)
    suf_min[n] = np.iinfo(np.int64).max
    for i in range(n - 1, -1, -1):
        suf_min[i] = min(gens[i], suf_min[i + 1])

    run_max = gens[0]
    last_g = np.iinfo(np.int64).min   # generation of last emitted candidate
    min_since = np.iinfo(np.int64).max  # min generation strictly after it, before n
    for i in range(1, n):
        g = gens[i]
        if g > run_max:
            if is_one[i]:
                gated = (last_g != np.iinfo(np.int64).min
                         and min_since >= last_g
                         and suf_min[i + 1] < last_g)
                if not gated:
                    out[m] = i
                    m += 1
                    last_g = g
                    min_since = np.iinfo(np.int64).max
                    run_max = g
                    continue
            run_max = g
        if g < min_since:
            min_since = g
    return out[:m]
