"""Classified cohort responses: CSV ingestion, per-cohort counts and cohort comparison."""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, TextIO

from . import metrics
from .errors import EmptyCohort, EmptyDataset, MissingColumn, UnknownCategory, UnknownCohort, ZeroBaseline
from .metrics import Category, CategoryCounts, CategoryScheme

COLUMNS = ("respondent", "cohort", "response", "category")


@dataclass(frozen=True)
class ResponseRecord:
    respondent: str
    cohort: str
    response: str
    category: str


@dataclass(frozen=True)
class Cohort:
    id: str
    description: str = ""
    operators_shown: tuple[str, ...] = ()


@dataclass(frozen=True)
class StudyDataset:
    cohorts: tuple[Cohort, ...]
    records: tuple[ResponseRecord, ...]
    scheme: CategoryScheme

    def __post_init__(self) -> None:
        object.__setattr__(self, "cohorts", tuple(self.cohorts))
        object.__setattr__(self, "records", tuple(self.records))
        ids = [c.id for c in self.cohorts]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate cohort ids in {ids}")
        known = set(ids)
        categories = set(self.scheme.ids)
        for r in self.records:
            if r.cohort not in known:
                raise UnknownCohort(r.cohort)
            if r.category not in categories:
                raise UnknownCategory(r.category)

    def cohort(self, cohort_id: str) -> Cohort:
        for c in self.cohorts:
            if c.id == cohort_id:
                return c
        raise UnknownCohort(cohort_id)

    def records_for(self, cohort_id: str) -> list[ResponseRecord]:
        self.cohort(cohort_id)
        return [r for r in self.records if r.cohort == cohort_id]


def ingest_csv(stream: TextIO, scheme: CategoryScheme) -> StudyDataset:
    """Read ``respondent,cohort,response,category`` rows into a dataset.

    Cohorts are registered in order of first appearance. Row numbers in
    errors count the header as row 1.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise EmptyDataset("no header row")
    header = [h.strip() for h in header]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}")
    if tuple(header) != COLUMNS:
        raise MissingColumn(f"header must be exactly {','.join(COLUMNS)}, got {','.join(header)}")

    categories = set(scheme.ids)
    cohorts: dict[str, Cohort] = {}
    records = []
    for rowno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(COLUMNS):
            raise MissingColumn(f"row {rowno}: expected {len(COLUMNS)} fields, got {len(row)}")
        record = ResponseRecord(*(cell.strip() for cell in row))
        if record.category not in categories:
            raise UnknownCategory(record.category, rowno)
        cohorts.setdefault(record.cohort, Cohort(record.cohort))
        records.append(record)
    if not records:
        raise EmptyDataset("no data rows")
    return StudyDataset(tuple(cohorts.values()), tuple(records), scheme)


def write_csv(records: Iterable[ResponseRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([r.respondent, r.cohort, r.response, r.category])


def cohort_counts(dataset: StudyDataset, cohort: str) -> CategoryCounts:
    records = dataset.records_for(cohort)
    if not records:
        raise EmptyCohort(cohort)
    return metrics.classify(records, dataset.scheme)


@dataclass(frozen=True)
class TreatmentEntry:
    cohort: str
    accuracy: float
    miss_rate: float
    accuracy_gain: float | None  # None: baseline accuracy is 0
    precision_gain: float | None  # None: baseline miss rate is 0
    proportions: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ComparisonReport:
    baseline: str
    baseline_accuracy: float
    baseline_miss_rate: float
    baseline_proportions: dict[str, float]
    treatments: tuple[TreatmentEntry, ...]

    def as_dict(self) -> dict[str, Any]:
        def undefined(x: float | None) -> float | str:
            return "undefined" if x is None else x

        return {
            "baseline": {
                "cohort": self.baseline,
                "accuracy": self.baseline_accuracy,
                "miss_rate": self.baseline_miss_rate,
                "proportions": self.baseline_proportions,
            },
            "treatments": [
                {
                    "cohort": t.cohort,
                    "accuracy": t.accuracy,
                    "miss_rate": t.miss_rate,
                    "accuracy_gain": undefined(t.accuracy_gain),
                    "precision_gain": undefined(t.precision_gain),
                    "proportions": t.proportions,
                }
                for t in self.treatments
            ],
        }


def _gain(fn, baseline: float, treated: float) -> float | None:
    try:
        return fn(baseline, treated)
    except ZeroBaseline:
        return None


def compare_cohorts(dataset: StudyDataset, baseline: str, treatments: Sequence[str]) -> ComparisonReport:
    """Accuracy, miss rate and their relative gains for each treatment cohort vs the baseline."""
    preferred = dataset.scheme.preferred
    base = cohort_counts(dataset, baseline)
    base_acc = metrics.cognitive_accuracy(base, preferred)
    base_miss = metrics.miss_rate(base, preferred)
    entries = []
    for cohort in treatments:
        counts = cohort_counts(dataset, cohort)
        acc = metrics.cognitive_accuracy(counts, preferred)
        miss = metrics.miss_rate(counts, preferred)
        entries.append(
            TreatmentEntry(
                cohort,
                acc,
                miss,
                _gain(metrics.accuracy_gain, base_acc, acc),
                _gain(metrics.precision_gain, base_miss, miss),
                counts.proportions(),
            )
        )
    return ComparisonReport(baseline, base_acc, base_miss, base.proportions(), tuple(entries))


# Case-study fixture: a solution-synthesis task on clay-target litter.

SKEET_PROBLEM = "Stop shattered clay-target fragments from damaging the grass field at a skeet range."

OPS_1 = (
    "exclude the source",
    "use a disposable object",
    "apply liquid support/Introduce a liquid",
    "inversion (apply the opposite)",
    "phase transformation (freeze/melt/boil; solid/liquid/gas/plasma)",
)

OPS_2 = (
    "transform a substance to a fluid state",
    "self-healing (system corrects itself)",
    "formation of mixtures",
    "transform the aggregate state to eliminate a harmful effect",
    "resources - modified water",
)

SKEET_SCHEME = CategoryScheme(
    (
        Category("F", description="modifying the field"),
        Category("T", description="modifying the target"),
        Category("G", description="modifying the gun or bullet"),
    ),
    preferred="T",
)

_SOLUTIONS = {
    "F": (
        "cover the field with a tarp or net",
        "clean up the field after shooting",
        "relocate to a site without a grass field",
    ),
    "T": (
        "make targets from biodegradable material",
        "make targets from fertilizer and nutrients good for grass",
        "make targets that dissolve rapidly",
    ),
    "G": (
        "use a different kind of gun or bullet",
        "use a laser or electromagnetic gun and target",
    ),
}

# per 100 responses: F, T, G
_PROPORTIONS = {
    "none": {"F": 61, "T": 27, "G": 12},
    "ops1": {"F": 52, "T": 40, "G": 8},
    "ops1+2": {"F": 43, "T": 47, "G": 10},
}

_SYNTHETIC = "synthetic records, 100 per cohort, matching the published category percentages"


def _fixture_records(cohort: str) -> list[ResponseRecord]:
    records = []
    for category, n in _PROPORTIONS[cohort].items():
        texts = _SOLUTIONS[category]
        for i in range(n):
            records.append(ResponseRecord("", cohort, texts[i % len(texts)], category))
    return [
        ResponseRecord(f"{cohort}-{i + 1:03d}", r.cohort, r.response, r.category)
        for i, r in enumerate(records)
    ]


def case_study_fixture() -> tuple[StudyDataset, CategoryScheme]:
    """Three cohorts (no operators, first operator list, both lists) of 100 synthetic responses each."""
    cohorts = (
        Cohort("none", f"problem statement only; {_SYNTHETIC}"),
        Cohort("ops1", f"problem statement and five operators; {_SYNTHETIC}", OPS_1),
        Cohort("ops1+2", f"problem statement and ten operators; {_SYNTHETIC}", OPS_1 + OPS_2),
    )
    records = [r for c in cohorts for r in _fixture_records(c.id)]
    return StudyDataset(cohorts, tuple(records), SKEET_SCHEME), SKEET_SCHEME


def fixture_csv() -> str:
    dataset, _ = case_study_fixture()
    buf = io.StringIO()
    write_csv(dataset.records, buf)
    return buf.getvalue()
