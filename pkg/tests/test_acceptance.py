"""Acceptance gate: ten numbered end-to-end checks with frozen tolerances.

Each test prints exactly one `ACCEPTANCE NN PASS/FAIL` line (visible in the
pytest -rA summary) before asserting, so the gate status is readable at a
glance.  Budgets are wall-clock seconds on a single CPU with warm kernels;
the session-level warmup fixture keeps compilation out of the timings.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest
from util import unit_laws

from gwtwalk.cli import main as cli_main
from gwtwalk.config import parse_config
from gwtwalk.driver import run_increments, replica_walk
from gwtwalk.env import Environment, OffspringLaw, ConductanceLaw
from gwtwalk.estimate import (donsker_sample, epsilon_sweep, ks_statistic,
                              sigma2_regen, speed_regen, speed_upper_bound)
from gwtwalk.network import (monte_carlo_return_fraction,
                             effective_conductance_to_level,
                             return_probability_before_level,
                             solve_absorbing_chain, Truncation)
from gwtwalk.regen import IncrementSample, confirm_regenerations
from gwtwalk.rng import derive_key
from gwtwalk.verify import random_truncation
from gwtwalk.walk import run_walk

SEED = 1
CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def report(num: int, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:02d} {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {num}: {detail}"


@pytest.fixture(scope="module")
def oracle_runs():
    """Shared d-ary unit-tree increment runs used by criteria 1 and 2:
    10^6 steps, 16 replicas each, plus the elapsed wall time."""
    t0 = time.monotonic()
    runs = {}
    for d in (2, 3):
        off, cond = unit_laws(d)
        runs[d] = run_increments(off, cond, steps=1_000_000, replicas=16,
                                 margin=20, seed=SEED)
    return runs, time.monotonic() - t0


def test_01_speed_oracle(oracle_runs):
    runs, sim_seconds = oracle_runs
    details = []
    ok = sim_seconds < 30.0
    for d in (2, 3):
        run = runs[d]
        want = (d - 1) / (d + 1)
        naive = float(run.final_gens.sum()) / (1_000_000 * 16)
        regen = speed_regen(IncrementSample(run.dtau, run.dd)).value
        ok &= abs(naive - want) < 0.01 and abs(regen - want) < 0.01
        details.append(f"d={d}: naive={naive:.4f} regen={regen:.4f} want={want:.4f}")
    report(1, ok, "; ".join(details) + f"; tol 0.01, {sim_seconds:.1f}s < 30s")


def test_02_volatility_oracle(oracle_runs):
    runs, sim_seconds = oracle_runs
    t0 = time.monotonic()
    details = []
    ok = True
    for d in (2, 3):
        run = runs[d]
        want = 4.0 * d / (d + 1) ** 2
        sample = IncrementSample(run.dtau, run.dd)
        ok &= len(sample) >= 10_000
        est = sigma2_regen(sample, bootstrap=300, seed=SEED)
        rel = abs(est.value - want) / want
        ok &= rel < 0.05
        details.append(f"d={d}: sigma2={est.value:.4f} want={want:.4f} "
                       f"rel={rel:.4f} pairs={len(sample)}")
    seconds = sim_seconds + (time.monotonic() - t0)
    ok &= seconds < 120.0
    report(2, ok, "; ".join(details) + f"; rel tol 0.05, {seconds:.1f}s < 120s")


def test_03_network_identity():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(100):
        t = random_truncation(rng, min_depth=3, max_depth=8)
        worst = max(worst, abs(return_probability_before_level(t)
                               - solve_absorbing_chain(t)[1]))
    off2, cond2 = unit_laws(2)
    t2 = Truncation.from_env(Environment(off2, cond2, seed=SEED), 2)
    hand_ret = return_probability_before_level(t2)
    hand_ok = abs(hand_ret - 3.0 / 7.0) < 1e-12
    for d in (2, 3, 5):
        offd, condd = unit_laws(d)
        td = Truncation.from_env(Environment(offd, condd, seed=SEED), 1)
        hand_ok &= abs(effective_conductance_to_level(td) - d) < 1e-12
    ok = worst < 1e-9 and hand_ok
    report(3, ok, f"max |fold - solve| = {worst:.2e} over 100 truncations "
                  f"(tol 1e-9); depth-2 binary return={hand_ret:.6f} (want 3/7); "
                  f"depth-1 conductance = d for d in 2,3,5")


def test_04_monte_carlo_vs_network():
    rng = np.random.default_rng(SEED + 4)
    n_walks = 100_000
    fails, worst_z = 0, 0.0
    for i in range(20):
        t = random_truncation(rng, min_depth=3, max_depth=8)
        exact = return_probability_before_level(t)
        mc = monte_carlo_return_fraction(t, n_walks, seed=derive_key(SEED, 100 + i))
        se = max(math.sqrt(exact * (1.0 - exact) / n_walks), 1e-12)
        z = abs(mc - exact) / se
        worst_z = max(worst_z, z)
        fails += z > 4.0
    ok = fails <= 1
    report(4, ok, f"{20 - fails}/20 truncations within 4 SE of the exact value "
                  f"(need >= 19), worst z={worst_z:.2f}, {n_walks} walks each")


def test_05_rayleigh_monotonicity():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for _ in range(1000):
        t = random_truncation(rng, min_depth=3, max_depth=8)
        before = effective_conductance_to_level(t)
        node = int(rng.integers(1, t.node_count))
        factor = 1.0 + 9.0 * rng.random()
        after = effective_conductance_to_level(t.with_scaled_edge(node, factor))
        worst = min(worst, (after - before) / before)
    ok = worst >= -1e-12
    report(5, ok, f"most negative relative conductance change over 1000 "
                  f"random edge increases: {worst:.2e} (tol -1e-12)")


def test_06_donsker_marginals():
    t0 = time.monotonic()
    off, cond = unit_laws(2)
    sample = donsker_sample(off, cond, n=10_000, replicas=2000,
                            tgrid=(0.25, 1.0), v=1.0 / 3.0,
                            sigma=math.sqrt(8.0 / 9.0), seed=SEED)
    ks = ks_statistic(sample.values[:, 1], variance=1.0)
    var_q = float(sample.values[:, 0].var(ddof=1))
    var_1 = float(sample.values[:, 1].var(ddof=1))
    ratio = var_q / var_1
    seconds = time.monotonic() - t0
    ok = ks < 0.0365 and abs(ratio - 0.25) / 0.25 < 0.15 and seconds < 300.0
    report(6, ok, f"KS={ks:.4f} (tol 0.0365, N=2000); "
                  f"var(1/4)/var(1)={ratio:.4f} within 15% of 0.25; "
                  f"{seconds:.1f}s < 300s")


def test_07_sweep_volatility_positive():
    t0 = time.monotonic()
    off = OffspringLaw({3: 1.0})
    cond = ConductanceLaw(alpha=0.3, epsilon=0.01, mu1={1.0: 1.0}, kappa=2.0)
    points = epsilon_sweep(off, cond, [0.1, 0.01, 0.001], steps=200_000,
                           replicas=2, margin=20, seed=SEED)
    seconds = time.monotonic() - t0
    ok = seconds < 900.0
    details = []
    for pt in points:
        ok &= pt.pairs >= 5000 and pt.sigma2.ci_low > 0.0 and pt.t1_supercritical
        details.append(f"eps={pt.epsilon:g}: ci=[{pt.sigma2.ci_low:.3f},"
                       f"{pt.sigma2.ci_high:.3f}] pairs={pt.pairs}")
    report(7, ok, "; ".join(details)
           + f"; every 95% CI must exclude 0; {seconds:.1f}s < 900s")


def test_08_regeneration_horizon_bias():
    off, cond = unit_laws(2)
    n = 1_000_000
    env = Environment(off, cond, seed=SEED)
    short = confirm_regenerations(run_walk(env, n, walk_seed=SEED), margin=20)
    extended = confirm_regenerations(run_walk(env, 10 * n, walk_seed=SEED),
                                     margin=20)
    still = set(extended.times.tolist())
    lost = sum(1 for t in short.times.tolist() if t not in still)
    frac = lost / len(short)
    ok = len(short) >= 10_000 and frac < 1e-3
    report(8, ok, f"{lost}/{len(short)} confirmations invalidated by a 10x "
                  f"extension (fraction {frac:.2e}, tol 1e-3)")


def test_09_speed_bound_across_shipped_configs():
    details = []
    ok = True
    for path in sorted(CONFIG_DIR.glob("*.ini")):
        cfg = parse_config(path)
        run = run_increments(cfg.offspring, cfg.conductance,
                             steps=min(cfg.steps, 200_000),
                             replicas=min(cfg.replicas, 4),
                             margin=cfg.margin, seed=cfg.require_seed())
        est = speed_regen(IncrementSample(run.dtau, run.dd))
        bound = speed_upper_bound(cfg.offspring)
        ok &= est.value <= bound + 3.0 * est.stderr
        details.append(f"{path.name}: v={est.value:.4f} bound={bound:.4f}")
    report(9, ok, "; ".join(details) + "; require v <= bound + 3*stderr")


def test_10_simulate_determinism(tmp_path):
    config = tmp_path / "repro.ini"
    base = (CONFIG_DIR / "d2_unit.ini").read_text()
    config.write_text(base.replace("steps = 1000000", "steps = 20000")
                          .replace("replicas = 16", "replicas = 2"))
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    code1 = cli_main(["simulate", "--config", str(config), "--out", str(out1)])
    code2 = cli_main(["simulate", "--config", str(config), "--out", str(out2)])
    same = {name: (out1 / name).read_bytes() == (out2 / name).read_bytes()
            for name in ("increments.csv", "summary.json", "trace.svg")}
    ok = code1 == 0 and code2 == 0 and all(same.values())
    report(10, ok, "byte-identical rerun: "
           + ", ".join(f"{k}={'yes' if v else 'NO'}" for k, v in same.items()))
