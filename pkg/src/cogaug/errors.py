"""Exception hierarchy shared by the simulator, metrics and study layers."""

from __future__ import annotations


class CogAugError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class InvalidMachine(CogAugError, ValueError):
    def __init__(self, problems: list[str]) -> None:
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InputSymbolUnknown(CogAugError, ValueError):
    def __init__(self, symbols: list[str]) -> None:
        self.symbols = symbols
        super().__init__(f"input uses undeclared symbol(s): {', '.join(map(repr, symbols))}")


class UnclassifiableOutput(CogAugError, LookupError):
    def __init__(self, output: str) -> None:
        self.output = output
        super().__init__(f"output {output!r} belongs to no category")


class UnknownCategory(CogAugError, LookupError):
    def __init__(self, value: str, row: int | None = None) -> None:
        self.value = value
        self.row = row
        where = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}unknown category {value!r}")


class EmptyCounts(CogAugError, ValueError):
    pass


class ZeroBaseline(CogAugError, ZeroDivisionError):
    pass


class UndefinedFactor(CogAugError, ZeroDivisionError):
    def __init__(self, factor: str) -> None:
        self.factor = factor
        super().__init__(f"{factor} is undefined: numerator and denominator are both 0")


class MissingColumn(CogAugError, ValueError):
    pass


class EmptyDataset(CogAugError, ValueError):
    pass


class UnknownCohort(CogAugError, LookupError):
    def __init__(self, cohort: str) -> None:
        self.cohort = cohort
        super().__init__(f"unknown cohort {cohort!r}")


class EmptyCohort(CogAugError, ValueError):
    def __init__(self, cohort: str) -> None:
        self.cohort = cohort
        super().__init__(f"cohort {cohort!r} has no records")
