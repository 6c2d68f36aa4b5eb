#!/usr/bin/env python3
"""Empirical check that standardized generation marginals look Brownian:
estimate speed and volatility from one long run, standardize many short
replicas on a time grid, report KS distances and variance scaling, and
write the samples as a `t,value` CSV.

Usage: python scripts/donsker_experiment.py --config configs/donsker_d2.ini
       [--out DIR] [--threads N]
"""

import argparse
import math
from pathlib import Path

from gwtwalk.config import canonical_text, parse_config
from gwtwalk.driver import run_increments
from gwtwalk.estimate import (donsker_sample, ks_statistic, sigma2_regen,
                              speed_regen, write_donsker_csv)
from gwtwalk.regen import IncrementSample


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, required=True)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    cfg = parse_config(args.config)
    seed = cfg.require_seed()

    # fit v and sigma on an independent long run of the same model
    fit = run_increments(cfg.offspring, cfg.conductance, steps=cfg.steps * 10,
                         replicas=4, margin=cfg.margin, seed=seed + 1)
    sample = IncrementSample(fit.dtau, fit.dd)
    v = speed_regen(sample).value
    s2 = sigma2_regen(sample, bootstrap=300, seed=seed).value
    print(f"fitted v={v:.5f} sigma2={s2:.5f} from {fit.pairs} pairs")

    marginals = donsker_sample(cfg.offspring, cfg.conductance, n=cfg.steps,
                               replicas=cfg.replicas, tgrid=cfg.tgrid, v=v,
                               sigma=math.sqrt(s2), seed=seed,
                               threads=args.threads)
    for j, t in enumerate(cfg.tgrid):
        col = marginals.values[:, j]
        var = col.var(ddof=1)
        line = f"t={t}: var={var:.4f} (want {t})"
        if t > 0:
            line += f"  KS={ks_statistic(col, variance=t):.4f}"
        print(line)

    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / "donsker.csv"
    comments = ["gwtwalk donsker v1"] + canonical_text(cfg).splitlines()
    csv_path.write_text(write_donsker_csv(marginals, comments),
                        encoding="utf-8")
    print(f"wrote {csv_path}")


if __name__ == "__main__":
    main()
