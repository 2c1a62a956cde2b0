"""Stochastic Turing machine simulation and cognitive accuracy/precision metrics."""

__version__ = "0.1.0"

from .gim import Machine, Move, Outcome, Rule, batch_run, run, step  # noqa: E402
from .outputs import DIVERGENT, OutputSet, randomness, subset_probability  # noqa: E402

__all__ = [
    "DIVERGENT",
    "Machine",
    "Move",
    "Outcome",
    "OutputSet",
    "Rule",
    "batch_run",
    "randomness",
    "run",
    "step",
    "subset_probability",
]
