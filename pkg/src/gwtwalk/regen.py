"""Regeneration structure of a trajectory.

A regeneration happens when the walk steps to a strictly new maximum
generation through an edge of conductance exactly 1 and never afterwards
returns below that level.  "Never" is not decidable from a finite window, so
confirmation combines never-backtracked-in-window with a progress margin:
only false confirmations are possible, and their probability decays
geometrically in the margin (measured, not assumed — see the invalidation
test).  Increment pairs between consecutive confirmed times are the raw
material for the speed and volatility estimators.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .walk import Trajectory


@dataclass
class RegenRecord:
    """Confirmed regeneration step indices, their generations, and the
    confirmation margin that was applied."""

    times: np.ndarray
    positions: np.ndarray
    margin: int

    def __len__(self) -> int:
        return len(self.times)


@dataclass
class IncrementSample:
    """Per-regeneration increments (steps taken, generations gained)."""

    dtau: np.ndarray
    dd: np.ndarray

    def __len__(self) -> int:
        return len(self.dtau)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(int(t), int(d)) for t, d in zip(self.dtau, self.dd)]


def potential_regenerations(traj: Trajectory) -> np.ndarray:
    """Step indices that look like regenerations from the walk's past alone:
    strict fresh-maximum generation entered through a conductance-1 edge,
    with candidates suppressed while the walk still sits above the previous
    candidate's return level."""
    if traj.codes is None:
        raise ValueError("trajectory lacks edge data")
    return _k.potential_regen_kernel(traj.gens, traj.one_edge_mask())


def confirm_regenerations(traj: Trajectory, margin: int) -> RegenRecord:
    """Filter potential regenerations by the future of the window: keep a
    candidate at generation g only if the walk never revisits g-1 and its
    running maximum afterwards reaches g + margin."""
    if margin < 1:
        raise ValueError("margin must be >= 1")
    cand = potential_regenerations(traj)
    gens = traj.gens.astype(np.int64)
    n = len(gens)
    # suffix extrema with sentinels for the empty suffix
    suf_min = np.empty(n + 1, np.int64)
    suf_max = np.empty(n + 1, np.int64)
    suf_min[n] = np.iinfo(np.int64).max
    suf_max[n] = np.iinfo(np.int64).min
    suf_min[:n] = np.minimum.accumulate(gens[::-1])[::-1]
    suf_max[:n] = np.maximum.accumulate(gens[::-1])[::-1]
    g = gens[cand]
    keep = (suf_min[cand + 1] >= g) & (suf_max[cand + 1] >= g + margin)
    times = cand[keep]
    return RegenRecord(times, gens[times], int(margin))


def increments(record: RegenRecord) -> IncrementSample:
    """Consecutive (steps, generations) increments between confirmed times.

    The first raw pair is discarded (the stretch up to the first regeneration
    is distributed differently from the rest) and so is the last one (its
    confirmation leans hardest on the window edge).
    """
    if len(record) < 4:
        raise ValueError(
            f"insufficient regenerations: need >= 4 confirmed times, have {len(record)}")
    dtau = np.diff(record.times)[1:-1]
    dd = np.diff(record.positions)[1:-1]
    return IncrementSample(dtau, dd)


def write_increments_csv(sample: IncrementSample, comments: list[str] | None = None) -> str:
    """CSV text with columns dtau,dd; `comments` lines are emitted first,
    each prefixed with '# '."""
    out = io.StringIO()
    for line in comments or []:
        out.write(f"# {line}\n")
    out.write("dtau,dd\n")
    for t, d in zip(sample.dtau, sample.dd):
        out.write(f"{int(t)},{int(d)}\n")
    return out.getvalue()
