"""Cross-validation battery: exact network identities, Rayleigh monotonicity,
Monte Carlo vs. linear algebra, scaled-path normality, and the analytic
speed/volatility values on regular trees.

Each check returns its observed value, the tolerance applied, and a verdict;
the CLI `verify` subcommand turns the battery into an exit status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .driver import run_increments
from .env import ConductanceLaw, Environment, OffspringLaw
from .estimate import donsker_sample, ks_statistic, sigma2_regen, speed_regen
from .network import (Truncation, effective_conductance_to_level,
                      monte_carlo_return_fraction,
                      return_probability_before_level, solve_absorbing_chain)
from .regen import IncrementSample
from .rng import derive_key

UNIT_KAPPA = 2.0
UNIT_EPS = 0.01


@dataclass
class CheckResult:
    name: str
    observed: float
    tolerance: float
    passed: bool
    detail: str = ""


def unit_tree_laws(d: int) -> tuple[OffspringLaw, ConductanceLaw]:
    """Deterministic d-ary tree with every conductance equal to 1."""
    return (OffspringLaw({d: 1.0}),
            ConductanceLaw(0.0, UNIT_EPS, {1.0: 1.0}, UNIT_KAPPA))


def mixed_laws() -> tuple[OffspringLaw, ConductanceLaw]:
    """A generic supercritical law with weak and strong edges mixed."""
    return (OffspringLaw({1: 0.3, 2: 0.4, 3: 0.3}),
            ConductanceLaw(0.3, 0.01, {0.5: 0.2, 1.0: 0.6, 2.0: 0.2}, 2.0))


def random_truncation(rng: np.random.Generator, min_depth: int = 3,
                      max_depth: int = 8) -> Truncation:
    off, cond = mixed_laws()
    depth = int(rng.integers(min_depth, max_depth + 1))
    env = Environment(off, cond, int(rng.integers(0, 2 ** 63)))
    return Truncation.from_env(env, depth)


# ------------------------------------------------------------------- checks

def check_hand_values(scale: float = 1.0) -> list[CheckResult]:
    """Closed-form electrical values on tiny trees."""
    tol = 1e-12 * scale
    out = []

    off, cond = unit_tree_laws(2)
    env = Environment(off, cond, seed=7)
    t2 = Truncation.from_env(env, 2)
    c = effective_conductance_to_level(t2)
    out.append(CheckResult("conductance_binary_depth2", abs(c - 4.0 / 3.0), tol,
                           abs(c - 4.0 / 3.0) < tol, f"C={c!r}, want 4/3"))
    p = return_probability_before_level(t2)
    out.append(CheckResult("return_binary_depth2", abs(p - 3.0 / 7.0), tol,
                           abs(p - 3.0 / 7.0) < tol, f"p={p!r}, want 3/7"))
    h = solve_absorbing_chain(t2)
    out.append(CheckResult("harmonic_binary_depth2", abs(h[1] - 3.0 / 7.0), 1e-9 * scale,
                           abs(h[1] - 3.0 / 7.0) < 1e-9 * scale,
                           f"h(root)={float(h[1])!r}"))

    for d in (2, 3, 5):
        off, cond = unit_tree_laws(d)
        env = Environment(off, cond, seed=11)
        c = effective_conductance_to_level(Truncation.from_env(env, 1))
        out.append(CheckResult(f"conductance_depth1_d{d}", abs(c - d), tol,
                               abs(c - d) < tol, f"C={c!r}, want {d}"))
    return out


def check_network_identity(seed: int, count: int = 100,
                           scale: float = 1.0) -> CheckResult:
    """Series/parallel fold vs. sparse harmonic solve at the root."""
    rng = np.random.default_rng(derive_key(seed, 101))
    worst = 0.0
    for _ in range(count):
        trunc = random_truncation(rng)
        p1 = return_probability_before_level(trunc)
        p2 = float(solve_absorbing_chain(trunc)[1])
        worst = max(worst, abs(p1 - p2))
    tol = 1e-9 * scale
    return CheckResult("network_identity", worst, tol, worst < tol,
                       f"max |fold - solve| over {count} truncations")


def check_rayleigh(seed: int, count: int = 1000, scale: float = 1.0) -> CheckResult:
    """Raising one edge conductance must never lower the root conductance."""
    rng = np.random.default_rng(derive_key(seed, 102))
    worst = math.inf
    for _ in range(count):
        trunc = random_truncation(rng)
        before = effective_conductance_to_level(trunc)
        node = int(rng.integers(1, trunc.node_count))
        factor = 1.0 + 9.0 * rng.random()
        after = effective_conductance_to_level(trunc.with_scaled_edge(node, factor))
        worst = min(worst, (after - before) / before)
    tol = 1e-12 * scale
    return CheckResult("rayleigh_monotonicity", worst, -tol, worst >= -tol,
                       f"most negative relative change over {count} edge raises")


def check_mc_vs_network(seed: int, count: int = 20, walks: int = 100_000,
                        scale: float = 1.0) -> CheckResult:
    """Empirical ancestor-hit frequency vs. the exact value, 4 SE bands."""
    rng = np.random.default_rng(derive_key(seed, 103))
    allowed_fails = 1
    fails = 0
    worst_z = 0.0
    for i in range(count):
        trunc = random_truncation(rng)
        p = return_probability_before_level(trunc)
        phat = monte_carlo_return_fraction(trunc, walks, derive_key(seed, 500 + i))
        se = math.sqrt(p * (1.0 - p) / walks)
        z = abs(phat - p) / se if se > 0 else 0.0
        worst_z = max(worst_z, z)
        if z > 4.0 * scale:
            fails += 1
    return CheckResult("mc_vs_network", fails, allowed_fails, fails <= allowed_fails,
                       f"{fails}/{count} outside 4 SE (worst z={worst_z:.2f})")


def check_donsker(seed: int, n: int = 10_000, replicas: int = 2000,
                  scale: float = 1.0) -> list[CheckResult]:
    """Normality of the standardized generation at t=1, and the variance
    scaling between t=1/4 and t=1, on the binary unit tree."""
    off, cond = unit_tree_laws(2)
    v, sigma2 = 1.0 / 3.0, 8.0 / 9.0
    sample = donsker_sample(off, cond, n=n, replicas=replicas,
                            tgrid=(0.25, 1.0), v=v, sigma=math.sqrt(sigma2),
                            seed=derive_key(seed, 104))
    d = ks_statistic(sample.values[:, 1], variance=1.0)
    ks_crit = 1.63 / math.sqrt(replicas) * scale   # 1% point (0.0365 at N=2000)
    ratio = float(np.var(sample.values[:, 0]) / np.var(sample.values[:, 1]))
    var_tol = 0.15 * scale
    return [
        CheckResult("donsker_ks_t1", d, ks_crit, d < ks_crit,
                    f"KS distance at t=1, N={replicas}"),
        CheckResult("donsker_variance_ratio", abs(ratio - 0.25) / 0.25, var_tol,
                    abs(ratio - 0.25) / 0.25 < var_tol,
                    f"var(t=1/4)/var(t=1)={ratio:.4f}, want 0.25"),
    ]


def check_speed_oracle(seed: int, d: int, steps: int = 1_000_000,
                       replicas: int = 4, margin: int = 20,
                       scale: float = 1.0) -> list[CheckResult]:
    """On the d-ary unit tree the generation process is a lazy-free biased
    walk stepping +1 w.p. d/(d+1): speed (d-1)/(d+1), volatility 4d/(d+1)^2."""
    off, cond = unit_tree_laws(d)
    target_v = (d - 1.0) / (d + 1.0)
    target_s2 = 4.0 * d / (d + 1.0) ** 2
    run = run_increments(off, cond, steps=steps, replicas=replicas,
                         margin=margin, seed=derive_key(seed, 105 + d))
    sample = IncrementSample(run.dtau, run.dd)
    naive = float(run.final_gens.sum()) / (steps * replicas)
    reg = speed_regen(sample)
    s2 = sigma2_regen(sample, seed=seed)
    tol_v = 0.01 * scale
    tol_s2 = 0.05 * scale
    return [
        CheckResult(f"speed_naive_d{d}", abs(naive - target_v), tol_v,
                    abs(naive - target_v) < tol_v, f"v={naive:.5f}, want {target_v:.5f}"),
        CheckResult(f"speed_regen_d{d}", abs(reg.value - target_v), tol_v,
                    abs(reg.value - target_v) < tol_v,
                    f"v={reg.value:.5f} +- {reg.stderr:.5f}"),
        CheckResult(f"sigma2_d{d}", abs(s2.value - target_s2) / target_s2, tol_s2,
                    abs(s2.value - target_s2) / target_s2 < tol_s2,
                    f"sigma2={s2.value:.5f} from {s2.pairs} pairs, want {target_s2:.5f}"),
    ]


def run_battery(seed: int, scale: float = 1.0, fast: bool = False) -> list[CheckResult]:
    """The full verification battery; `fast` shrinks the sample sizes for
    smoke testing, `scale` multiplies every tolerance (0 breaks everything
    on purpose)."""
    results = []
    results += check_hand_values(scale)
    if fast:
        results.append(check_network_identity(seed, count=10, scale=scale))
        results.append(check_rayleigh(seed, count=50, scale=scale))
        results.append(check_mc_vs_network(seed, count=3, walks=20_000, scale=scale))
        results += check_donsker(seed, n=2000, replicas=500, scale=scale)
        results += check_speed_oracle(seed, 2, steps=200_000, replicas=2, scale=scale)
    else:
        results.append(check_network_identity(seed, scale=scale))
        results.append(check_rayleigh(seed, scale=scale))
        results.append(check_mc_vs_network(seed, scale=scale))
        results += check_donsker(seed, scale=scale)
        results += check_speed_oracle(seed, 2, scale=scale)
        results += check_speed_oracle(seed, 3, scale=scale)
    return results
