#!/usr/bin/env python3
"""Trace the volatility curve as the weak-edge conductance shrinks.

Thin wrapper over the `sweep` subcommand for interactive use: prints the
table to stdout instead of writing files.

Usage: python scripts/epsilon_sweep.py --config configs/sweep_supercritical.ini
       [--threads N]
"""

import argparse
from pathlib import Path

from gwtwalk.config import parse_config
from gwtwalk.estimate import epsilon_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, required=True)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    cfg = parse_config(args.config)
    if cfg.epsilons is None:
        ap.error("config has no [sweep] section")
    points = epsilon_sweep(cfg.offspring, cfg.conductance, cfg.epsilons,
                           steps=cfg.steps, replicas=cfg.replicas,
                           margin=cfg.margin, seed=cfg.require_seed(),
                           threads=args.threads)
    flag = ("supercritical" if points[0].t1_supercritical else "subcritical")
    print(f"strong-edge subtree: {flag}; unit-conductance speed bound "
          f"{points[0].bound:.5f}")
    print(f"{'epsilon':>10} {'v':>8} {'sigma2':>8} {'ci_low':>8} "
          f"{'ci_high':>8} {'pairs':>9}")
    for pt in points:
        print(f"{pt.epsilon:>10g} {pt.speed.value:>8.5f} "
              f"{pt.sigma2.value:>8.5f} {pt.sigma2.ci_low:>8.5f} "
              f"{pt.sigma2.ci_high:>8.5f} {pt.pairs:>9d}")


if __name__ == "__main__":
    main()
