"""Spectral reward decomposition RL workbench.

Thin Python surface over the C++ core: reward codec, target transforms,
desk-scale catch environments, tabular equivalence checks, and a training
entry point.
"""

from ._core import (
    Env,
    agent_names,
    check_equivalence,
    decompose,
    env_names,
    max_representable,
    reconstruct,
    squash,
    train,
    unsquash,
    verify,
)

__all__ = [
    "Env",
    "agent_names",
    "check_equivalence",
    "decompose",
    "env_names",
    "max_representable",
    "reconstruct",
    "squash",
    "train",
    "unsquash",
    "verify",
]
