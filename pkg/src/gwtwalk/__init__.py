"""Random walks on conductance-weighted Galton-Watson trees.

Lazily grown random environments, jit-compiled quenched walks, regeneration
based estimators for the speed and the CLT volatility, and exact electrical
network computations on finite truncations used to cross-check the Monte
Carlo side.
"""

from .config import ConfigError, ExperimentConfig, parse_config, parse_config_text
from .driver import IncrementRun, map_replicas, replica_walk, run_increments
from .env import ANCESTOR, ROOT, ConductanceLaw, Environment, OffspringLaw
from .estimate import (DonskerSample, SpeedEstimate, SweepPoint,
                       VolatilityEstimate, donsker_marginal, donsker_sample,
                       epsilon_sweep, ks_statistic, regeneration_count_rate,
                       sigma2_regen, speed_naive, speed_regen,
                       speed_upper_bound, write_donsker_csv)
from .network import (Truncation, combine_parallel, combine_series,
                      effective_conductance_to_level,
                      escape_probability_estimate,
                      monte_carlo_return_fraction,
                      return_probability_before_level, solve_absorbing_chain)
from .regen import (IncrementSample, RegenRecord, confirm_regenerations,
                    increments, potential_regenerations, write_increments_csv)
from .walk import (Trajectory, hitting_time_level, local_time, run_walk, step,
                   transition_distribution)

__version__ = "0.1.0"

__all__ = [
    "ANCESTOR", "ROOT",
    "ConductanceLaw", "Environment", "OffspringLaw",
    "ConfigError", "ExperimentConfig", "parse_config", "parse_config_text",
    "Trajectory", "run_walk", "step", "transition_distribution",
    "hitting_time_level", "local_time",
    "RegenRecord", "IncrementSample", "potential_regenerations",
    "confirm_regenerations", "increments", "write_increments_csv",
    "Truncation", "combine_series", "combine_parallel",
    "effective_conductance_to_level", "return_probability_before_level",
    "solve_absorbing_chain", "escape_probability_estimate",
    "monte_carlo_return_fraction",
    "IncrementRun", "map_replicas", "replica_walk", "run_increments",
    "SpeedEstimate", "VolatilityEstimate", "DonskerSample", "SweepPoint",
    "speed_upper_bound", "speed_naive", "speed_regen", "sigma2_regen",
    "donsker_marginal", "donsker_sample", "ks_statistic",
    "regeneration_count_rate", "epsilon_sweep", "write_donsker_csv",
    "__version__",
]
