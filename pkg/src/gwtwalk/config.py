"""Experiment configuration: a flat INI file with explicit sections.

Every output file embeds the canonical serialization produced here, so any
result can be reproduced from its own header.  The seed is mandatory — there
is no wall-clock fallback anywhere in the package.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace

from .env import ConductanceLaw, OffspringLaw


class ConfigError(Exception):
    """Invalid or incomplete experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    offspring: OffspringLaw
    conductance: ConductanceLaw
    steps: int
    replicas: int
    margin: int
    seed: int | None
    out: str | None = None
    epsilons: tuple[float, ...] | None = None
    depth: int = 6
    tgrid: tuple[float, ...] = (0.25, 0.5, 1.0)

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("[run] seed is required (pass it in the config or via --seed)")
        return self.seed

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=int(seed))


def _parse_pairs(text: str, section: str, key: str):
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        left, sep, right = item.partition(":")
        if not sep:
            raise ConfigError(f"[{section}] {key}: expected value:weight, got '{item}'")
        pairs.append((left.strip(), right.strip()))
    if not pairs:
        raise ConfigError(f"[{section}] {key}: empty list")
    return pairs


def _floats(text: str, section: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as e:
        raise ConfigError(f"[{section}] {key}: {e}") from None


def parse_config_text(text: str, origin: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as e:
        raise ConfigError(str(e)) from None

    for section in ("offspring", "conductance", "run"):
        if not parser.has_section(section):
            raise ConfigError(f"missing [{section}] section")

    probs = {}
    for key, val in parser.items("offspring"):
        try:
            k = int(key)
        except ValueError:
            raise ConfigError(f"[offspring] keys must be integers, got '{key}'") from None
        try:
            probs[k] = float(val)
        except ValueError:
            raise ConfigError(f"[offspring] {key}: '{val}' is not a probability") from None
    try:
        offspring = OffspringLaw(probs)
    except ValueError as e:
        raise ConfigError(f"[offspring] {e}") from None

    c = parser["conductance"]
    try:
        mu1 = {float(v): float(w) for v, w in
               _parse_pairs(c.get("mu1", ""), "conductance", "mu1")}
        conductance = ConductanceLaw(
            alpha=c.getfloat("alpha"),
            epsilon=c.getfloat("epsilon"),
            mu1=mu1,
            kappa=c.getfloat("kappa"))
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(f"[conductance] {e}") from None

    r = parser["run"]
    try:
        steps = r.getint("steps")
        replicas = r.getint("replicas")
        margin = r.getint("margin", fallback=20)
        seed = r.getint("seed", fallback=None)
        out = r.get("out", fallback=None)
    except ValueError as e:
        raise ConfigError(f"[run] {e}") from None
    if steps is None or steps < 1:
        raise ConfigError("[run] steps must be a positive integer")
    if replicas is None or replicas < 1:
        raise ConfigError("[run] replicas must be a positive integer")
    if margin < 1:
        raise ConfigError("[run] margin must be >= 1")

    epsilons = None
    if parser.has_section("sweep"):
        epsilons = _floats(parser["sweep"].get("epsilons", ""), "sweep", "epsilons")
        if not epsilons:
            raise ConfigError("[sweep] epsilons: empty list")
        for e in epsilons:
            if e <= 0.0:
                raise ConfigError(
                    "[sweep] positive epsilon required; the epsilon=0 model is out of scope")
            if e >= 1.0 / conductance.kappa:
                raise ConfigError(f"[sweep] epsilon {e} must be < 1/kappa")

    depth = 6
    if parser.has_section("network"):
        depth = parser["network"].getint("depth", fallback=6)
        if depth < 1:
            raise ConfigError("[network] depth must be >= 1")

    tgrid = (0.25, 0.5, 1.0)
    if parser.has_section("donsker"):
        tgrid = _floats(parser["donsker"].get("tgrid", ""), "donsker", "tgrid")
        for t in tgrid:
            if not (0.0 <= t <= 1.0):
                raise ConfigError(f"[donsker] tgrid entry {t} outside [0, 1]")

    return ExperimentConfig(offspring, conductance, int(steps), int(replicas),
                            int(margin), seed, out, epsilons, int(depth), tgrid)


def parse_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    return parse_config_text(text, origin=str(path))


def canonical_text(cfg: ExperimentConfig) -> str:
    """Normalized round-trippable INI serialization; embedded in every output."""
    out = io.StringIO()
    out.write("[offspring]\n")
    for k, p in cfg.offspring.probs:
        out.write(f"{k} = {p!r}\n")
    c = cfg.conductance
    out.write("\n[conductance]\n")
    out.write(f"alpha = {c.alpha!r}\n")
    out.write(f"epsilon = {c.epsilon!r}\n")
    out.write(f"kappa = {c.kappa!r}\n")
    out.write("mu1 = " + ",".join(f"{v!r}:{w!r}" for v, w in c.mu1) + "\n")
    out.write("\n[run]\n")
    out.write(f"steps = {cfg.steps}\n")
    out.write(f"replicas = {cfg.replicas}\n")
    out.write(f"margin = {cfg.margin}\n")
    if cfg.seed is not None:
        out.write(f"seed = {cfg.seed}\n")
    if cfg.out is not None:
        out.write(f"out = {cfg.out}\n")
    if cfg.epsilons is not None:
        out.write("\n[sweep]\n")
        out.write("epsilons = " + ",".join(repr(e) for e in cfg.epsilons) + "\n")
    out.write("\n[network]\n")
    out.write(f"depth = {cfg.depth}\n")
    out.write("\n[donsker]\n")
    out.write("tgrid = " + ",".join(repr(t) for t in cfg.tgrid) + "\n")
    return out.getvalue()
