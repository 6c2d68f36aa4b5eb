"""Estimators: hand values for the speed and volatility formulas, bootstrap
behavior, scaled-marginal statistics, and the epsilon sweep."""

import math

import numpy as np
import pytest
from util import mixed_laws, unit_laws

from gwtwalk.env import Environment, OffspringLaw
from gwtwalk.estimate import (DonskerSample, donsker_marginal, donsker_sample,
                              epsilon_sweep, ks_statistic,
                              regeneration_count_rate, sigma2_regen,
                              speed_naive, speed_regen, speed_upper_bound,
                              write_donsker_csv)
from gwtwalk.regen import (IncrementSample, RegenRecord, confirm_regenerations,
                           increments)
from gwtwalk.walk import Trajectory, run_walk


def sample_of(pairs):
    dtau = np.array([t for t, _ in pairs], np.int64)
    dd = np.array([d for _, d in pairs], np.int64)
    return IncrementSample(dtau, dd)


# ------------------------------------------------------------ speed bound


def test_speed_upper_bound_values():
    assert speed_upper_bound(OffspringLaw({2: 1.0})) == pytest.approx(1.0 / 3.0)
    assert speed_upper_bound(OffspringLaw({3: 1.0})) == pytest.approx(1.0 / 2.0)
    off, _ = mixed_laws()
    assert speed_upper_bound(off) == pytest.approx(0.4 / 3.0 + 0.3 / 2.0)


# ------------------------------------------------------------- naive speed


def test_speed_naive_short_run_has_no_stderr():
    off, cond = unit_laws(2)
    traj = run_walk(Environment(off, cond, seed=1), 10, walk_seed=1)
    est = speed_naive(traj)
    assert est.stderr is None
    assert est.value == traj.gens[-1] / 10


def test_speed_naive_bounded_by_max_generation():
    off, cond = unit_laws(2)
    env = Environment(off, cond, seed=1)
    gens = np.array([0, 1] * 50, np.int32)
    traj = Trajectory(nodes=np.zeros(100, np.int64), gens=gens,
                      codes=np.ones(100, np.int16), env=env)
    est = speed_naive(traj)
    assert est.value <= gens.max() / traj.n_steps


# -------------------------------------------------------------- regen speed


def test_speed_regen_constant_pairs():
    est = speed_regen(sample_of([(3, 1)] * 50))
    assert est.value == pytest.approx(1.0 / 3.0)
    assert est.stderr == 0.0
    assert est.method == "regeneration"


def test_speed_regen_is_ratio_of_sums():
    est = speed_regen(sample_of([(2, 1), (4, 1)] * 20))
    assert est.value == pytest.approx(1.0 / 3.0)   # 40 / 120, not mean(1/2, 1/4)


def test_speed_regen_needs_pairs():
    with pytest.raises(ValueError, match="insufficient pairs"):
        speed_regen(sample_of([(3, 1)] * 29))


def test_speed_estimators_agree_on_real_run():
    off, cond = unit_laws(2)
    env = Environment(off, cond, seed=3)
    traj = run_walk(env, 400_000, walk_seed=5)
    naive = speed_naive(traj)
    regen = speed_regen(increments(confirm_regenerations(traj, margin=20)))
    joint = math.hypot(naive.stderr, regen.stderr)
    assert abs(naive.value - regen.value) < 2 * joint


# -------------------------------------------------------------- volatility


def test_sigma2_degenerate_sample_is_zero():
    est = sigma2_regen(sample_of([(5, 2)] * 100), bootstrap=50, seed=1)
    assert est.value == 0.0
    assert est.ci_low == 0.0 and est.ci_high == 0.0
    assert est.speed == pytest.approx(0.4)


def test_sigma2_needs_pairs():
    with pytest.raises(ValueError, match="insufficient pairs"):
        sigma2_regen(sample_of([(5, 2)] * 99))


def test_sigma2_oracle_binary_tree():
    off, cond = unit_laws(2)
    env = Environment(off, cond, seed=7)
    traj = run_walk(env, 400_000, walk_seed=7)
    sample = increments(confirm_regenerations(traj, margin=20))
    est = sigma2_regen(sample, seed=7)
    want = 8.0 / 9.0
    assert abs(est.value - want) / want < 0.05
    assert est.ci_low < want < est.ci_high
    assert est.pairs == len(sample)


def test_sigma2_bootstrap_deterministic():
    sample = sample_of([(3, 1), (5, 3), (2, 1), (7, 3)] * 30)
    a = sigma2_regen(sample, bootstrap=100, seed=9)
    b = sigma2_regen(sample, bootstrap=100, seed=9)
    c = sigma2_regen(sample, bootstrap=100, seed=10)
    assert (a.value, a.stderr, a.ci_low, a.ci_high) == \
        (b.value, b.stderr, b.ci_low, b.ci_high)
    assert a.stderr != c.stderr
    assert a.value == c.value   # the point estimate ignores the bootstrap


# ------------------------------------------------------- scaled marginals


def test_donsker_at_time_zero():
    off, cond = unit_laws(2)
    env = Environment(off, cond, seed=2)
    trajs = [run_walk(env, 100, walk_seed=s) for s in range(5)]
    vals = donsker_marginal(trajs, v=1.0 / 3.0, sigma=1.0, t=0.0)
    assert np.all(vals == 0.0)


def test_donsker_validation():
    off, cond = unit_laws(2)
    env = Environment(off, cond, seed=2)
    trajs = [run_walk(env, 100, walk_seed=1)]
    with pytest.raises(ValueError, match="sigma"):
        donsker_marginal(trajs, v=0.3, sigma=0.0, t=1.0)
    with pytest.raises(ValueError, match="t must"):
        donsker_marginal(trajs, v=0.3, sigma=1.0, t=1.5)


def test_donsker_sample_variance_scales_with_t():
    off, cond = unit_laws(2)
    sample = donsker_sample(off, cond, n=2000, replicas=400,
                            tgrid=(0.25, 1.0), v=1.0 / 3.0,
                            sigma=math.sqrt(8.0 / 9.0), seed=13)
    var_q, var_1 = sample.values.var(axis=0, ddof=1)
    assert abs(var_1 - 1.0) < 0.3
    assert abs(var_q - 0.25) < 0.1
    assert sample.values.shape == (400, 2)


def test_donsker_sample_deterministic_across_threads():
    off, cond = unit_laws(2)
    kw = dict(n=500, replicas=40, tgrid=(0.5, 1.0), v=1.0 / 3.0,
              sigma=1.0, seed=21)
    a = donsker_sample(off, cond, threads=1, **kw)
    b = donsker_sample(off, cond, threads=2, **kw)
    assert np.array_equal(a.values, b.values)


def test_donsker_csv():
    sample = DonskerSample(n=100, tgrid=(0.5, 1.0),
                           values=np.array([[0.25, -1.0], [0.5, 2.0]]))
    text = write_donsker_csv(sample, ["seed=1"])
    lines = text.splitlines()
    assert lines[0] == "# seed=1"
    assert lines[1] == "t,value"
    assert lines[2:] == ["0.5,0.25", "0.5,0.5", "1.0,-1.0", "1.0,2.0"]


# ----------------------------------------------------------------- KS test


def test_ks_accepts_true_normal():
    rng = np.random.default_rng(5)
    assert ks_statistic(rng.normal(size=2000)) < 0.0365
    assert ks_statistic(rng.normal(scale=2.0, size=2000), variance=4.0) < 0.0365


def test_ks_rejects_wrong_variance():
    rng = np.random.default_rng(5)
    assert ks_statistic(rng.normal(scale=2.0, size=2000), variance=1.0) > 0.1


def test_ks_constant_sample():
    assert ks_statistic(np.zeros(200)) >= 0.5


def test_ks_validation():
    with pytest.raises(ValueError, match="values"):
        ks_statistic(np.zeros(99))
    with pytest.raises(ValueError, match="variance"):
        ks_statistic(np.zeros(200), variance=0.0)


# ------------------------------------------------------------- count rate


def test_count_rate_hand_values():
    rec = RegenRecord(times=np.arange(2, 101, 2), positions=np.arange(50),
                      margin=1)
    assert regeneration_count_rate(rec, 100) == pytest.approx(0.5)
    assert regeneration_count_rate(rec, 1) == 0.0
    with pytest.raises(ValueError, match="empty"):
        regeneration_count_rate(RegenRecord(np.array([], np.int64),
                                            np.array([], np.int64), 1), 10)


def test_count_rate_consistent_with_mean_increment():
    off, cond = unit_laws(2)
    env = Environment(off, cond, seed=11)
    n = 400_000
    traj = run_walk(env, n, walk_seed=13)
    rec = confirm_regenerations(traj, margin=20)
    sample = increments(rec)
    rate = regeneration_count_rate(rec, n)
    mean_dtau = sample.dtau.mean()
    se = sample.dtau.std(ddof=1) / math.sqrt(len(sample))
    assert abs(1.0 / rate - mean_dtau) < 2 * se + 2.0 / rate / len(rec)


# ------------------------------------------------------------------ sweep


def test_sweep_alpha_zero_epsilon_irrelevant():
    off, cond = unit_laws(2)
    points = epsilon_sweep(off, cond, [0.1, 0.001], steps=150_000, replicas=2,
                           margin=20, seed=17, bootstrap=200)
    assert len(points) == 2
    a, b = points
    # same model at both epsilons: estimates agree within joint error bars
    joint = math.hypot(a.speed.stderr, b.speed.stderr)
    assert abs(a.speed.value - b.speed.value) < 3 * joint
    assert a.sigma2.ci_low < b.sigma2.value < a.sigma2.ci_high * 1.05
    for pt in points:
        assert pt.bound == pytest.approx(1.0 / 3.0)
        assert pt.t1_supercritical
        assert pt.pairs >= 1000


def test_sweep_empty_list_rejected():
    off, cond = unit_laws(2)
    with pytest.raises(ValueError, match="nonempty"):
        epsilon_sweep(off, cond, [], steps=1000, replicas=1, margin=5, seed=1)
