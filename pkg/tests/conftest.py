import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from util import unit_laws  # noqa: E402

from gwtwalk.env import Environment
from gwtwalk.network import Truncation, monte_carlo_return_fraction
from gwtwalk.regen import confirm_regenerations
from gwtwalk.walk import run_walk


@pytest.fixture(scope="session", autouse=True)
def jit_warmup():
    """Compile (or load from cache) every jit kernel once up front so that
    timing-sensitive tests measure the simulation, not the compiler."""
    off, cond = unit_laws(2)
    env = Environment(off, cond, seed=0)
    traj = run_walk(env, 64, walk_seed=0)
    confirm_regenerations(traj, margin=1)
    trunc = Truncation.from_env(env, 2)
    monte_carlo_return_fraction(trunc, 8, seed=0)
