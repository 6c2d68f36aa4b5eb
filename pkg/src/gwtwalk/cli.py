"""Command-line experiment runner.

Subcommands: simulate (increments + summary + trace plot), verify (the
cross-check battery with a machine-readable report), sweep (volatility curve
over epsilon), network (dump a truncation and its exact computations).
Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import estimate, verify
from .config import ConfigError, ExperimentConfig, canonical_text, parse_config
from .driver import run_increments
from .env import Environment
from .network import (Truncation, effective_conductance_to_level,
                      escape_probability_estimate,
                      return_probability_before_level, solve_absorbing_chain)
from .regen import IncrementSample, write_increments_csv
from .svg import line_plot


def _config_comment_lines(cfg: ExperimentConfig) -> list[str]:
    return canonical_text(cfg).splitlines()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _speed_json(est: estimate.SpeedEstimate) -> dict:
    return {"value": est.value, "stderr": est.stderr, "method": est.method}


def run_simulate(cfg: ExperimentConfig, out_dir: Path, threads: int) -> int:
    seed = cfg.require_seed()
    run = run_increments(cfg.offspring, cfg.conductance, steps=cfg.steps,
                         replicas=cfg.replicas, margin=cfg.margin, seed=seed,
                         threads=threads, keep_trace=True)
    sample = IncrementSample(run.dtau, run.dd)
    naive_value = float(run.final_gens.sum()) / (cfg.steps * cfg.replicas)
    naive_stderr = (float(np.std(run.final_gens / cfg.steps, ddof=1))
                    / math.sqrt(cfg.replicas)) if cfg.replicas > 1 else None

    summary: dict = {
        "config": canonical_text(cfg),
        "steps": cfg.steps,
        "replicas": cfg.replicas,
        "margin": cfg.margin,
        "seed": seed,
        "pairs": run.pairs,
        "speed_naive": {"value": naive_value, "stderr": naive_stderr,
                        "method": "naive"},
        "regeneration_rate": float(run.regen_counts.sum()) / (cfg.steps * cfg.replicas),
        "speed_bound": estimate.speed_upper_bound(cfg.offspring),
    }
    if run.pairs >= 100:
        sp = estimate.speed_regen(sample)
        s2 = estimate.sigma2_regen(sample, seed=seed)
        summary["speed_regen"] = _speed_json(sp)
        summary["sigma2"] = {"value": s2.value, "stderr": s2.stderr,
                             "pairs": s2.pairs, "speed": s2.speed,
                             "ci95": [s2.ci_low, s2.ci_high]}
    else:
        summary["speed_regen"] = None
        summary["sigma2"] = None

    comments = ["gwtwalk increments v1"] + _config_comment_lines(cfg)
    _write(out_dir / "increments.csv", write_increments_csv(sample, comments))
    _write(out_dir / "summary.json", json.dumps(summary, indent=2) + "\n")

    idx, gens = run.trace
    trace_svg = line_plot(idx, gens, title="walk trace (replica 0)",
                          xlabel="step", ylabel="generation",
                          comments=_config_comment_lines(cfg))
    _write(out_dir / "trace.svg", trace_svg)
    print(f"simulate: {run.pairs} increment pairs from {cfg.replicas} replicas "
          f"-> {out_dir}")
    return 0


def run_verify(cfg: ExperimentConfig | None, out_dir: Path, seed: int,
               scale: float, fast: bool) -> int:
    results = verify.run_battery(seed, scale=scale, fast=fast)
    passed = all(r.passed for r in results)
    report = {
        "seed": seed,
        "tolerance_scale": scale,
        "fast": fast,
        "checks": [{"name": r.name, "observed": float(r.observed),
                    "tolerance": float(r.tolerance), "passed": bool(r.passed),
                    "detail": r.detail} for r in results],
        "passed": bool(passed),
    }
    if cfg is not None:
        report["config"] = canonical_text(cfg)
    _write(out_dir / "verify.json", json.dumps(report, indent=2) + "\n")
    for r in results:
        mark = "ok  " if r.passed else "FAIL"
        print(f"{mark} {r.name}: observed={r.observed:.6g} "
              f"tolerance={r.tolerance:.6g} ({r.detail})")
    print(f"verify: {'all checks passed' if passed else 'FAILURES'} "
          f"-> {out_dir / 'verify.json'}")
    return 0 if passed else 1


def run_sweep(cfg: ExperimentConfig, out_dir: Path, threads: int) -> int:
    seed = cfg.require_seed()
    if cfg.epsilons is None:
        raise ConfigError("sweep requires a [sweep] section with an epsilons list")
    points = estimate.epsilon_sweep(
        cfg.offspring, cfg.conductance, cfg.epsilons, steps=cfg.steps,
        replicas=cfg.replicas, margin=cfg.margin, seed=seed, threads=threads)

    lines = ["# gwtwalk sweep v1"]
    lines += [f"# {c}" for c in _config_comment_lines(cfg)]
    lines.append(f"# t1_supercritical={points[0].t1_supercritical}")
    lines.append("epsilon,v,v_ci,sigma2,sigma2_ci,pairs,bound")
    for pt in points:
        v_lo = pt.speed.value - 1.96 * pt.speed.stderr
        v_hi = pt.speed.value + 1.96 * pt.speed.stderr
        lines.append(",".join([
            repr(pt.epsilon),
            repr(pt.speed.value), f"{v_lo!r}:{v_hi!r}",
            repr(pt.sigma2.value), f"{pt.sigma2.ci_low!r}:{pt.sigma2.ci_high!r}",
            str(pt.pairs), repr(pt.bound)]))
    _write(out_dir / "sweep.csv", "\n".join(lines) + "\n")

    xs = [pt.epsilon for pt in points]
    ys = [pt.sigma2.value for pt in points]
    band = ([pt.sigma2.ci_low for pt in points], [pt.sigma2.ci_high for pt in points])
    svg = line_plot(xs, ys, title="volatility vs epsilon", xlabel="epsilon",
                    ylabel="sigma^2", log_x=True, band=band,
                    comments=_config_comment_lines(cfg))
    _write(out_dir / "sweep.svg", svg)
    flag = "supercritical" if points[0].t1_supercritical else "SUBCRITICAL"
    print(f"sweep: {len(points)} points, strong-edge subtree {flag} "
          f"-> {out_dir}")
    return 0


def run_network(cfg: ExperimentConfig, out_dir: Path) -> int:
    seed = cfg.require_seed()
    env = Environment(cfg.offspring, cfg.conductance, seed)
    trunc = Truncation.from_env(env, cfg.depth)
    h = solve_absorbing_chain(trunc)
    cond = effective_conductance_to_level(trunc)
    ret = return_probability_before_level(trunc)
    esc, seq = escape_probability_estimate(env, cfg.depth)

    _write(out_dir / "truncation.txt", trunc.export_text())
    lines = ["# gwtwalk harmonic v1"]
    lines += [f"# {c}" for c in _config_comment_lines(cfg)]
    lines.append("vertex_id,h")
    for v in range(trunc.node_count):
        lines.append(f"{v},{float(h[v])!r}")
    _write(out_dir / "harmonic.csv", "\n".join(lines) + "\n")
    _write(out_dir / "network.json", json.dumps({
        "config": canonical_text(cfg),
        "seed": seed,
        "depth": cfg.depth,
        "nodes": trunc.node_count,
        "conductance_to_level": cond,
        "return_probability": ret,
        "escape_estimate": esc,
        "escape_sequence": seq,
    }, indent=2) + "\n")
    print(f"network: depth-{cfg.depth} truncation with {trunc.node_count} nodes, "
          f"return probability {ret:.6f} -> {out_dir}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gwtwalk",
        description="Random walks on conductance-weighted random trees: "
                    "simulation, regeneration estimators, exact cross-checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = dict(config=(("--config",), dict(type=Path, help="INI config file")),
                  seed=(("--seed",), dict(type=int, help="master seed (overrides config)")),
                  threads=(("--threads",), dict(type=int, default=1,
                                                help="worker thread cap")),
                  out=(("--out",), dict(type=Path, help="output directory")))
    for name, help_text in (
            ("simulate", "run replicas, write increments CSV, summary JSON, trace SVG"),
            ("verify", "run the cross-check battery and report pass/fail"),
            ("sweep", "estimate the volatility curve over an epsilon list"),
            ("network", "dump a truncation with its exact network computations")):
        p = sub.add_parser(name, help=help_text)
        for flags, kwargs in common.values():
            p.add_argument(*flags, **kwargs)
        if name == "verify":
            p.add_argument("--tolerance-scale", type=float, default=1.0,
                           help="multiply every tolerance (harness sanity knob)")
            p.add_argument("--fast", action="store_true",
                           help="smaller sample sizes, smoke-test mode")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config) if args.config else None
        if cfg is not None and args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.command == "verify":
            if cfg is not None:
                seed = args.seed if args.seed is not None else cfg.require_seed()
            elif args.seed is not None:
                seed = args.seed
            else:
                raise ConfigError("verify needs --seed or a config with [run] seed")
            out_dir = args.out or (Path(cfg.out) if cfg and cfg.out else Path("out"))
            return run_verify(cfg, out_dir, seed, args.tolerance_scale, args.fast)

        if cfg is None:
            raise ConfigError(f"{args.command} requires --config")
        out_dir = args.out or (Path(cfg.out) if cfg.out else Path("out"))
        if args.command == "simulate":
            return run_simulate(cfg, out_dir, args.threads)
        if args.command == "sweep":
            return run_sweep(cfg, out_dir, args.threads)
        if args.command == "network":
            return run_network(cfg, out_dir)
        raise AssertionError(f"unreachable command {args.command}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
