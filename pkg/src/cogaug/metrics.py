"""Cognitive accuracy, miss rate, gains, cluster concentration and the work/gain ledger.

Accuracy is the share of outputs landing in the preferred category. Two
precision-flavoured quantities are kept apart on purpose:

* ``precision_gain`` is the relative drop in miss rate between a baseline
  and an augmented cohort (positive when the augmented cohort misses less);
* ``concentration`` measures how tightly outputs cluster over the category
  scheme, regardless of which category is preferred.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from .errors import (
    EmptyCounts,
    UnclassifiableOutput,
    UndefinedFactor,
    UnknownCategory,
    ZeroBaseline,
)
from .outputs import OutputSet, normalized_entropy

UNBOUNDED = math.inf


@dataclass(frozen=True)
class Category:
    id: str
    members: frozenset[str] = frozenset()
    description: str = ""


@dataclass(frozen=True)
class CategoryScheme:
    categories: tuple[Category, ...]
    preferred: str
    catch_all: str | None = None

    def __post_init__(self) -> None:
        cats = tuple(self.categories)
        object.__setattr__(self, "categories", cats)
        ids = [c.id for c in cats]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate category ids in {ids}")
        if self.preferred not in ids:
            raise ValueError(f"preferred category {self.preferred!r} is not declared")
        if self.catch_all is not None and self.catch_all not in ids:
            raise ValueError(f"catch-all category {self.catch_all!r} is not declared")
        owner: dict[str, str] = {}
        for cat in cats:
            for m in cat.members:
                if m in owner:
                    raise ValueError(f"output {m!r} is in both {owner[m]!r} and {cat.id!r}")
                owner[m] = cat.id
        object.__setattr__(self, "_owner", owner)

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.categories]

    def category_of(self, output: str) -> str:
        found = self._owner.get(output, self.catch_all)  # type: ignore[attr-defined]
        if found is None:
            raise UnclassifiableOutput(output)
        return found


@dataclass(frozen=True)
class CategoryCounts:
    """Per-category counts, ordered as in the scheme they came from."""

    counts: Mapping[str, int]

    def __post_init__(self) -> None:
        counts = dict(self.counts)
        if any(c < 0 for c in counts.values()):
            raise ValueError("category counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, category: str) -> int:
        return self.counts[category]

    def scaled(self, k: int) -> CategoryCounts:
        return CategoryCounts({c: n * k for c, n in self.counts.items()})

    def proportions(self) -> dict[str, float]:
        total = self._nonempty_total()
        return {c: n / total for c, n in self.counts.items()}

    def _nonempty_total(self) -> int:
        total = self.total
        if total == 0:
            raise EmptyCounts("no outputs were counted")
        return total


def classify(
    source: OutputSet | Mapping[str, int] | Iterable[Any], scheme: CategoryScheme
) -> CategoryCounts:
    """Count outputs per category.

    ``source`` is an :class:`OutputSet`, a plain ``output -> count`` mapping,
    or an iterable of labelled records (anything with a ``category``
    attribute). Every scheme category appears in the result, possibly as 0.
    """
    tally = Counter({cid: 0 for cid in scheme.ids})
    if isinstance(source, OutputSet):
        source = source.counts
    if isinstance(source, Mapping):
        for output, n in source.items():
            tally[scheme.category_of(output)] += n
    else:
        known = set(scheme.ids)
        for record in source:
            if record.category not in known:
                raise UnknownCategory(record.category)
            tally[record.category] += 1
    return CategoryCounts({cid: tally[cid] for cid in scheme.ids})


def _count_of(counts: CategoryCounts, preferred: str) -> int:
    if preferred not in counts.counts:
        raise UnknownCategory(preferred)
    return counts[preferred]


def cognitive_accuracy(counts: CategoryCounts, preferred: str) -> float:
    """Share of outputs in the preferred category."""
    total = counts._nonempty_total()
    return _count_of(counts, preferred) / total


def miss_rate(counts: CategoryCounts, preferred: str) -> float:
    total = counts._nonempty_total()
    return (total - _count_of(counts, preferred)) / total


def accuracy_gain(baseline_accuracy: float, augmented_accuracy: float) -> float:
    """Relative change in accuracy; negative when the augmented cohort does worse."""
    if baseline_accuracy == 0:
        raise ZeroBaseline("baseline accuracy is 0; relative gain is undefined")
    return (augmented_accuracy - baseline_accuracy) / baseline_accuracy


def precision_gain(baseline_miss: float, augmented_miss: float) -> float:
    """Relative reduction in miss rate; positive when the augmented cohort misses less."""
    if baseline_miss == 0:
        raise ZeroBaseline("baseline miss rate is 0; relative gain is undefined")
    return (baseline_miss - augmented_miss) / baseline_miss


def concentration(counts: CategoryCounts) -> float:
    """1 minus the normalized entropy of the category proportions."""
    counts._nonempty_total()
    return 1.0 - normalized_entropy(counts.counts.values())


class Quadrant(enum.Enum):
    HIGH_ACCURACY_HIGH_PRECISION = "HighAccuracyHighPrecision"
    HIGH_ACCURACY_LOW_PRECISION = "HighAccuracyLowPrecision"
    LOW_ACCURACY_HIGH_PRECISION = "LowAccuracyHighPrecision"
    LOW_ACCURACY_LOW_PRECISION = "LowAccuracyLowPrecision"


def quadrant(
    accuracy: float,
    concentration: float,
    accuracy_threshold: float = 0.5,
    concentration_threshold: float = 0.5,
) -> Quadrant:
    """Place a result in the accuracy/precision grid; ties at a threshold count as high."""
    for name, t in (("accuracy", accuracy_threshold), ("concentration", concentration_threshold)):
        if not 0.0 < t < 1.0:
            raise ValueError(f"{name} threshold must be in (0, 1), got {t}")
    high_a = accuracy >= accuracy_threshold
    high_c = concentration >= concentration_threshold
    if high_a:
        return Quadrant.HIGH_ACCURACY_HIGH_PRECISION if high_c else Quadrant.HIGH_ACCURACY_LOW_PRECISION
    return Quadrant.LOW_ACCURACY_HIGH_PRECISION if high_c else Quadrant.LOW_ACCURACY_LOW_PRECISION


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    miss_rate: float
    proportions: Mapping[str, float]
    concentration: float
    quadrant: Quadrant
    randomness: float | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "miss_rate": self.miss_rate,
            "proportions": dict(self.proportions),
            "concentration": self.concentration,
            "quadrant": self.quadrant.value,
            "randomness": self.randomness,
        }


def measure(
    counts: CategoryCounts,
    preferred: str,
    randomness: float | None = None,
    accuracy_threshold: float = 0.5,
    concentration_threshold: float = 0.5,
) -> MetricsReport:
    acc = cognitive_accuracy(counts, preferred)
    conc = concentration(counts)
    return MetricsReport(
        accuracy=acc,
        miss_rate=miss_rate(counts, preferred),
        proportions=counts.proportions(),
        concentration=conc,
        quadrant=quadrant(acc, conc, accuracy_threshold, concentration_threshold),
        randomness=randomness,
    )


@dataclass(frozen=True)
class CognitiveLedger:
    """Cognitive work and gain contributed by the human and the artificial partner.

    Units are whatever the caller measures in; only nonnegativity is enforced.
    """

    work_human: float
    work_cog: float
    gain_human: float
    gain_cog: float

    def __post_init__(self) -> None:
        for name in ("work_human", "work_cog", "gain_human", "gain_cog"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a finite nonnegative number, got {value!r}")


@dataclass(frozen=True)
class AugmentationFactors:
    work_total: float
    gain_total: float
    work_factor: float
    gain_factor: float


def totals(ledger: CognitiveLedger) -> tuple[float, float]:
    """Ensemble work and gain: the human and artificial contributions summed."""
    return ledger.work_human + ledger.work_cog, ledger.gain_human + ledger.gain_cog


def augmentation_factor(artificial: float, human: float, name: str = "augmentation factor") -> float:
    """Artificial contribution over human contribution for one work or gain pair."""
    if artificial == 0 and human == 0:
        raise UndefinedFactor(name)
    if artificial == 0:
        return 0.0
    if human == 0:
        return UNBOUNDED
    return artificial / human


def augmentation_factors(ledger: CognitiveLedger) -> AugmentationFactors:
    """Artificial-to-human ratios for work and for gain.

    A factor is 0 for an unaided human and :data:`UNBOUNDED` when the human
    contributes nothing; a pair that is entirely zero raises
    :class:`UndefinedFactor`.
    """
    work_total, gain_total = totals(ledger)
    return AugmentationFactors(
        work_total,
        gain_total,
        augmentation_factor(ledger.work_cog, ledger.work_human, "work augmentation factor"),
        augmentation_factor(ledger.gain_cog, ledger.gain_human, "gain augmentation factor"),
    )
