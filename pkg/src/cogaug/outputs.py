"""Output multisets produced by repeated runs, and their distribution statistics."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

DIVERGENT = "⊥divergent"
"""Reserved output key for trials that exceeded the step bound."""


@dataclass(frozen=True)
class OutputSet:
    input: str
    counts: Mapping[str, int]
    trials: int
    master_seed: int

    def __post_init__(self) -> None:
        counts = {k: self.counts[k] for k in sorted(self.counts)}
        if not counts:
            raise ValueError("an output set needs at least one output")
        if any(not isinstance(c, int) or c < 1 for c in counts.values()):
            raise ValueError("output counts must be positive integers")
        if sum(counts.values()) != self.trials:
            raise ValueError(f"counts sum to {sum(counts.values())}, trials is {self.trials}")
        object.__setattr__(self, "counts", counts)

    @property
    def cardinality(self) -> int:
        """Number of distinct outputs, |C|."""
        return len(self.counts)

    def frequencies(self) -> dict[str, float]:
        return {k: c / self.trials for k, c in self.counts.items()}


def normalized_entropy(counts: Iterable[int], k: int | None = None) -> float:
    """Shannon entropy of ``counts`` divided by ``log(k)``.

    ``k`` defaults to the number of entries; zero entries contribute nothing
    to the entropy but do count toward ``k``. Returns 0.0 when ``k < 2``.
    Exact-count uniformity returns exactly 1.0, anything else stays below it.
    """
    counts = list(counts)
    k = len(counts) if k is None else k
    total = sum(counts)
    if total <= 0:
        raise ValueError("entropy of an empty distribution")
    if k < 2:
        return 0.0
    if len(counts) == k and len(set(counts)) == 1:
        return 1.0
    h = -math.fsum(c / total * math.log(c / total) for c in counts if c)
    return min(max(h / math.log(k), 0.0), math.nextafter(1.0, 0.0))


def randomness(output_set: OutputSet) -> float:
    """Disorder of the realized output distribution, in [0, 1].

    0 when a single output was produced, 1 when counts are spread evenly
    over two or more distinct outputs.
    """
    return normalized_entropy(output_set.counts.values())


def subset_probability(
    output_set: OutputSet,
    subset: Iterable[str],
    mode: Literal["frequency", "distinct"] = "frequency",
    exact: bool = False,
) -> float | Fraction:
    """Probability mass of ``subset`` within the output set.

    ``frequency`` weights each output by how often it occurred;
    ``distinct`` is the ratio of distinct members to |C|. Keys absent from
    the output set contribute zero. ``exact=True`` returns a Fraction.
    """
    members = set(subset) & output_set.counts.keys()
    if mode == "frequency":
        value = Fraction(sum(output_set.counts[m] for m in members), output_set.trials)
    elif mode == "distinct":
        value = Fraction(len(members), output_set.cardinality)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return value if exact else float(value)
