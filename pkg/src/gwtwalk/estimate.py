"""Estimators built on trajectories and regeneration increments: walk speed,
CLT volatility, scaled-path marginals, and the epsilon sweep.

The regeneration route expresses speed as a ratio of increment means and the
volatility as the normalized mean square of the speed-centered increments;
both inherit i.i.d.-style error bars from the independence of increments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from . import driver
from .env import ConductanceLaw, OffspringLaw
from .regen import IncrementSample, RegenRecord
from .rng import TAG_BOOT, derive_key
from .walk import Trajectory

BATCH_COUNT = 30          # batch-means batches for the naive speed error bar
BOOTSTRAP_DEFAULT = 1000  # resamples behind the volatility error bar


@dataclass
class SpeedEstimate:
    value: float
    stderr: float | None
    method: str


@dataclass
class VolatilityEstimate:
    value: float
    stderr: float
    pairs: int
    speed: float
    ci_low: float
    ci_high: float


@dataclass
class DonskerSample:
    """Standardized generation marginals (X_[tn] - tn*v) / (sigma sqrt(n))
    for each replica and each grid time."""

    n: int
    tgrid: tuple[float, ...]
    values: np.ndarray        # shape (replicas, len(tgrid))


def speed_upper_bound(offspring: OffspringLaw) -> float:
    """Speed of the walk on the tree with all conductances equal; random
    conductances can only slow the walk down, so this bounds the speed."""
    return math.fsum(p * (k - 1) / (k + 1) for k, p in offspring.probs)


def speed_naive(traj: Trajectory) -> SpeedEstimate:
    """Endpoint estimator |X_n|/n with a batch-means error bar."""
    n = traj.n_steps
    if n < 1:
        raise ValueError("need at least one step")
    value = float(traj.gens[-1]) / n
    if n < BATCH_COUNT:
        return SpeedEstimate(value, None, "naive")
    edges = np.linspace(0, n, BATCH_COUNT + 1).astype(np.int64)
    gains = np.diff(traj.gens[edges].astype(np.float64))
    slopes = gains / np.diff(edges)
    stderr = float(np.std(slopes, ddof=1) / math.sqrt(BATCH_COUNT))
    return SpeedEstimate(value, stderr, "naive")


def speed_regen(sample: IncrementSample) -> SpeedEstimate:
    """Ratio-of-sums speed over regeneration increments, with a delta-method
    error bar for the ratio of means."""
    m = len(sample)
    if m < 30:
        raise ValueError(f"insufficient pairs: need >= 30, have {m}")
    dtau = sample.dtau.astype(np.float64)
    dd = sample.dd.astype(np.float64)
    tbar = dtau.mean()
    v = dd.sum() / dtau.sum()
    resid = dd - v * dtau
    var = float(resid @ resid) / (m - 1)
    stderr = math.sqrt(var / m) / tbar
    return SpeedEstimate(float(v), float(stderr), "regeneration")


def _sigma2_plugin(dtau: np.ndarray, dd: np.ndarray) -> tuple[float, float]:
    v = dd.sum() / dtau.sum()
    resid = dd - v * dtau
    return float((resid @ resid) / len(dtau) / dtau.mean()), float(v)


def sigma2_regen(sample: IncrementSample, *, bootstrap: int = BOOTSTRAP_DEFAULT,
                 seed: int = 0) -> VolatilityEstimate:
    """Plug-in volatility: mean squared speed-centered increment per unit of
    increment time, with the ratio speed re-fit inside every bootstrap
    resample.  The 95% interval comes from the resample percentiles."""
    m = len(sample)
    if m < 100:
        raise ValueError(f"insufficient pairs: need >= 100, have {m}")
    dtau = sample.dtau.astype(np.float64)
    dd = sample.dd.astype(np.float64)
    value, v = _sigma2_plugin(dtau, dd)
    rng = np.random.default_rng(derive_key(seed, TAG_BOOT))
    reps = np.empty(bootstrap, np.float64)
    for b in range(bootstrap):
        idx = rng.integers(0, m, m)
        reps[b], _ = _sigma2_plugin(dtau[idx], dd[idx])
    lo, hi = np.percentile(reps, [2.5, 97.5])
    return VolatilityEstimate(value, float(np.std(reps, ddof=1)), m, v,
                              float(lo), float(hi))


def donsker_marginal(trajs: list[Trajectory], v: float, sigma: float,
                     t: float) -> np.ndarray:
    """Per-replica standardized generation at time fraction t of each walk."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if not (0.0 <= t <= 1.0):
        raise ValueError("t must lie in [0, 1]")
    out = np.empty(len(trajs), np.float64)
    for i, traj in enumerate(trajs):
        n = traj.n_steps
        k = math.floor(t * n)
        out[i] = (float(traj.gens[k]) - k * v) / (sigma * math.sqrt(n))
    return out


def donsker_sample(offspring: OffspringLaw, conductance: ConductanceLaw, *,
                   n: int, replicas: int, tgrid, v: float, sigma: float,
                   seed: int, threads: int = 1, batch: int = 200) -> DonskerSample:
    """Run independent replicas and collect their standardized marginals on a
    time grid, streaming in batches so trajectories are never all in memory."""
    tgrid = tuple(float(t) for t in tgrid)
    values = np.empty((replicas, len(tgrid)), np.float64)
    done = 0
    while done < replicas:
        count = min(batch, replicas - done)
        trajs = driver.map_replicas(
            lambda r, base=done: driver.replica_walk(offspring, conductance,
                                                     n, seed, base + r),
            count, threads)
        for j, t in enumerate(tgrid):
            values[done:done + count, j] = donsker_marginal(trajs, v, sigma, t)
        done += count
    return DonskerSample(int(n), tgrid, values)


def write_donsker_csv(sample: DonskerSample, comments=()) -> str:
    """Render standardized marginals as `t,value` CSV text, one row per
    replica and grid time, preceded by `#` comment lines."""
    lines = [f"# {c}" for c in comments]
    lines.append("t,value")
    for j, t in enumerate(sample.tgrid):
        for val in sample.values[:, j]:
            lines.append(f"{t!r},{float(val)!r}")
    return "\n".join(lines) + "\n"


def ks_statistic(values, variance: float = 1.0) -> float:
    """Sup distance between the empirical CDF of `values` and the CDF of a
    centered normal with the given variance."""
    x = np.sort(np.asarray(values, np.float64))
    n = len(x)
    if n < 100:
        raise ValueError(f"need >= 100 values, have {n}")
    if variance <= 0:
        raise ValueError("variance must be > 0")
    cdf = 0.5 * (1.0 + scipy.special.erf(x / math.sqrt(2.0 * variance)))
    lo = cdf - np.arange(0, n) / n
    hi = np.arange(1, n + 1) / n - cdf
    return float(max(lo.max(), hi.max()))


def regeneration_count_rate(record: RegenRecord, n: int) -> float:
    """Confirmed regenerations per step within the first n steps; the inverse
    estimates the mean time between regenerations."""
    if len(record) == 0:
        raise ValueError("empty regeneration record")
    return float(np.count_nonzero(record.times <= n)) / float(n)


@dataclass
class SweepPoint:
    epsilon: float
    speed: SpeedEstimate
    sigma2: VolatilityEstimate
    pairs: int
    bound: float
    t1_supercritical: bool


def epsilon_sweep(offspring: OffspringLaw, conductance: ConductanceLaw,
                  epsilons, *, steps: int, replicas: int, margin: int,
                  seed: int, threads: int = 1,
                  bootstrap: int = BOOTSTRAP_DEFAULT) -> list[SweepPoint]:
    """Estimate speed and volatility across epsilon values, one independent
    replica set per point.  Each point reports the unit-conductance speed
    bound and whether the strong-edge subtree is supercritical."""
    epsilons = [float(e) for e in epsilons]
    if not epsilons:
        raise ValueError("epsilon list must be nonempty")
    bound = speed_upper_bound(offspring)
    supercrit = (1.0 - conductance.alpha) * offspring.mean > 1.0
    points = []
    for i, eps in enumerate(epsilons):
        law = conductance.with_epsilon(eps)
        run = driver.run_increments(
            offspring, law, steps=steps, replicas=replicas, margin=margin,
            seed=derive_key(seed, i), threads=threads)
        sample = IncrementSample(run.dtau, run.dd)
        points.append(SweepPoint(
            epsilon=eps,
            speed=speed_regen(sample),
            sigma2=sigma2_regen(sample, bootstrap=bootstrap, seed=derive_key(seed, i)),
            pairs=run.pairs,
            bound=bound,
            t1_supercritical=bool(supercrit)))
    return points
