"""Shared helpers for the test suite: canonical law combinations and a text
builder for frozen chain environments."""

from gwtwalk.env import ConductanceLaw, Environment, OffspringLaw

KAPPA = 2.0
EPS = 0.01


def unit_laws(d: int):
    """Deterministic d-ary tree, every edge conductance exactly 1."""
    return (OffspringLaw({d: 1.0}),
            ConductanceLaw(alpha=0.0, epsilon=EPS, mu1={1.0: 1.0}, kappa=KAPPA))


def mixed_laws():
    """Random offspring and a three-atom conductance law with weak edges."""
    return (OffspringLaw({1: 0.3, 2: 0.4, 3: 0.3}),
            ConductanceLaw(alpha=0.3, epsilon=EPS,
                           mu1={0.5: 0.2, 1.0: 0.6, 2.0: 0.2}, kappa=KAPPA))


def chain_text(values, alpha=0.5, epsilon=EPS, kappa=KAPPA, mu1="1.0:1.0",
               seed=1):
    """Environment text for a frozen unary chain.  values[i] is the
    conductance of the edge into the node at generation i; the first entry is
    the edge between the virtual ancestor and the root."""
    lines = [
        "# gwtwalk environment v1",
        f"# seed={seed}",
        "# offspring=none",
        f"# alpha={alpha!r}",
        f"# epsilon={epsilon!r}",
        f"# kappa={kappa!r}",
        f"# mu1={mu1}",
        "# columns=id parent_id generation conductance",
        "0 -1 -1 -",
    ]
    for i, val in enumerate(values):
        lines.append(f"{i + 1} {i} {i} {float(val)!r}")
    return "\n".join(lines) + "\n"


def chain_env(values, **kwargs) -> Environment:
    return Environment.from_text(chain_text(values, **kwargs))
