"""Stochastic Turing machine: definitions, single steps, bounded runs and seeded batches.

Every transition rule carries a probability distribution over outcomes, so
repeated runs on one input yield a distribution of outputs. Outcome
selection is a cumulative scan in declared order against one uniform draw
per step, which keeps runs reproducible given the draw stream.
"""

from __future__ import annotations

import enum
import itertools
import math
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputSymbolUnknown, InvalidMachine
from .outputs import DIVERGENT, OutputSet

PROBABILITY_TOLERANCE = 1e-9
DEFAULT_MAX_STEPS = 10_000

_NAME = re.compile(r"[^\s#:]+")


def valid_name(token: str) -> bool:
    """Symbol and state names: non-empty, no whitespace, no ``#`` or ``:``."""
    return isinstance(token, str) and _NAME.fullmatch(token) is not None


class Move(enum.Enum):
    LEFT = "L"
    RIGHT = "R"
    STAY = "S"

    @property
    def offset(self) -> int:
        return _OFFSETS[self]


_OFFSETS = {Move.LEFT: -1, Move.RIGHT: 1, Move.STAY: 0}


@dataclass(frozen=True)
class Outcome:
    write: str
    move: Move
    next: str
    probability: float


@dataclass(frozen=True)
class Rule:
    state: str
    read: str
    outcomes: tuple[Outcome, ...]
    _thresholds: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        outcomes = tuple(self.outcomes)
        object.__setattr__(self, "outcomes", outcomes)
        problems = rule_problems(outcomes)
        if problems:
            raise InvalidMachine([f"rule ({self.state}, {self.read}): {p}" for p in problems])
        object.__setattr__(
            self, "_thresholds", tuple(itertools.accumulate(o.probability for o in outcomes))
        )

    @property
    def key(self) -> tuple[str, str]:
        return self.state, self.read

    def select(self, draw: float) -> Outcome:
        """First outcome whose cumulative probability exceeds ``draw``."""
        for outcome, threshold in zip(self.outcomes, self._thresholds):
            if draw < threshold:
                return outcome
        # cumulative sum may land a hair below 1.0
        return self.outcomes[-1]


def rule_problems(outcomes: Sequence[Outcome]) -> list[str]:
    if not outcomes:
        return ["rule has no outcomes"]
    problems = []
    for o in outcomes:
        p = o.probability
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p <= 1.0:
            problems.append(f"outcome probability {p!r} is not in (0, 1]")
    if not problems:
        total = math.fsum(o.probability for o in outcomes)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            problems.append(f"probabilities sum to {total:.12g}, expected 1")
    return problems


@dataclass(frozen=True)
class Machine:
    """A validated machine. Rules are keyed by ``(state, read)``."""

    alphabet: frozenset[str]
    blank: str
    states: frozenset[str]
    start: str
    halting: frozenset[str]
    rules: Mapping[tuple[str, str], Rule]

    def __init__(
        self,
        alphabet: Iterable[str],
        blank: str,
        states: Iterable[str],
        start: str,
        halting: Iterable[str],
        rules: Iterable[Rule] | Mapping[tuple[str, str], Rule] = (),
    ) -> None:
        alphabet = list(alphabet)
        states = list(states)
        rule_list = list(rules.values() if isinstance(rules, Mapping) else rules)
        problems = []
        for kind, names in (("symbol", alphabet), ("state", states)):
            for dup in sorted(n for n, c in Counter(names).items() if c > 1):
                problems.append(f"duplicate {kind} {dup!r}")
            for bad in names:
                if not valid_name(bad):
                    problems.append(f"invalid {kind} name {bad!r}")
        keyed: dict[tuple[str, str], Rule] = {}
        for rule in rule_list:
            if rule.key in keyed:
                problems.append(f"duplicate rule for ({rule.state}, {rule.read})")
            keyed[rule.key] = rule
        object.__setattr__(self, "alphabet", frozenset(alphabet))
        object.__setattr__(self, "blank", blank)
        object.__setattr__(self, "states", frozenset(states))
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "halting", frozenset(halting))
        object.__setattr__(self, "rules", keyed)
        problems.extend(self._reference_problems())
        if problems:
            raise InvalidMachine(problems)

    def _reference_problems(self) -> list[str]:
        problems = []
        if self.blank not in self.alphabet:
            problems.append(f"blank symbol {self.blank!r} is not in the alphabet")
        if self.start not in self.states:
            problems.append(f"start state {self.start!r} is not declared")
        for h in sorted(self.halting - self.states):
            problems.append(f"halting state {h!r} is not declared")
        for (state, read), rule in sorted(self.rules.items()):
            where = f"rule ({state}, {read})"
            if state not in self.states:
                problems.append(f"{where}: undeclared state {state!r}")
            elif state in self.halting:
                problems.append(f"{where}: keyed on halting state {state!r}")
            if read not in self.alphabet:
                problems.append(f"{where}: undeclared symbol {read!r}")
            for o in rule.outcomes:
                if o.write not in self.alphabet:
                    problems.append(f"{where}: undeclared symbol {o.write!r}")
                if o.next not in self.states:
                    problems.append(f"{where}: undeclared state {o.next!r}")
        return problems

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.alphabet)

    def tokenize(self, text: str | Sequence[str]) -> list[str]:
        """Split input text into symbols.

        With a single-character alphabet every character is a symbol;
        otherwise symbols are whitespace-separated. A pre-split sequence is
        taken as is.
        """
        if not isinstance(text, str):
            symbols = list(text)
        elif self.single_char:
            symbols = list(text)
        else:
            symbols = text.split()
        unknown = sorted(set(symbols) - self.alphabet)
        if unknown:
            raise InputSymbolUnknown(unknown)
        return symbols

    def render(self, cells: Mapping[int, str]) -> str:
        """Contiguous span between the outermost non-blank cells."""
        written = [pos for pos, sym in cells.items() if sym != self.blank]
        if not written:
            return ""
        lo, hi = min(written), max(written)
        sep = "" if self.single_char else " "
        return sep.join(cells.get(pos, self.blank) for pos in range(lo, hi + 1))


@dataclass(frozen=True)
class TapeConfiguration:
    cells: Mapping[int, str]
    head: int
    state: str
    steps: int = 0

    @classmethod
    def initial(cls, machine: Machine, input: str | Sequence[str]) -> TapeConfiguration:
        symbols = machine.tokenize(input)
        cells = {i: s for i, s in enumerate(symbols) if s != machine.blank}
        return cls(cells, 0, machine.start, 0)

    def read(self, blank: str) -> str:
        return self.cells.get(self.head, blank)


class HaltReason(enum.Enum):
    HALTING_STATE = "halting-state"
    NO_RULE = "no-rule"


@dataclass(frozen=True)
class HaltSignal:
    reason: HaltReason
    config: TapeConfiguration


def _matching_rule(machine: Machine, state: str, symbol: str) -> Rule | HaltReason:
    if state in machine.halting:
        return HaltReason.HALTING_STATE
    rule = machine.rules.get((state, symbol))
    return HaltReason.NO_RULE if rule is None else rule


def step(machine: Machine, config: TapeConfiguration, draw: float) -> TapeConfiguration | HaltSignal:
    """Apply one stochastic transition, or signal a halt with ``config`` unchanged."""
    found = _matching_rule(machine, config.state, config.read(machine.blank))
    if isinstance(found, HaltReason):
        return HaltSignal(found, config)
    outcome = found.select(draw)
    cells = dict(config.cells)
    if outcome.write == machine.blank:
        cells.pop(config.head, None)
    else:
        cells[config.head] = outcome.write
    return TapeConfiguration(cells, config.head + outcome.move.offset, outcome.next, config.steps + 1)


class RunKind(enum.Enum):
    HALTED = "halted"
    STEP_BOUND_EXCEEDED = "step-bound-exceeded"


@dataclass(frozen=True)
class RunOutcome:
    kind: RunKind
    output: str | None
    steps: int

    @property
    def halted(self) -> bool:
        return self.kind is RunKind.HALTED


def draw_stream(rng: np.random.Generator, block: int = 64) -> Iterator[float]:
    """Uniform draws in [0, 1), fetched from ``rng`` in blocks."""
    while True:
        yield from rng.random(block).tolist()


def trial_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Seed for trial ``index``: depends only on the master seed and the index."""
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def _execute(machine: Machine, symbols: Sequence[str], draws: Iterator[float], max_steps: int) -> RunOutcome:
    # Mutating twin of ``step``; tests hold the two equivalent.
    blank = machine.blank
    halting = machine.halting
    rules = machine.rules
    cells = {i: s for i, s in enumerate(symbols) if s != blank}
    head, state, steps = 0, machine.start, 0
    while state not in halting:
        rule = rules.get((state, cells.get(head, blank)))
        if rule is None:
            break
        if steps >= max_steps:
            return RunOutcome(RunKind.STEP_BOUND_EXCEEDED, None, steps)
        outcome = rule.select(next(draws))
        if outcome.write == blank:
            cells.pop(head, None)
        else:
            cells[head] = outcome.write
        head += outcome.move.offset
        state = outcome.next
        steps += 1
    return RunOutcome(RunKind.HALTED, machine.render(cells), steps)


def _check_bound(max_steps: int) -> None:
    if max_steps < 1:
        raise ValueError(f"max_steps must be positive, got {max_steps}")


def run(
    machine: Machine,
    input: str | Sequence[str],
    seed: int | np.random.SeedSequence,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> RunOutcome:
    _check_bound(max_steps)
    symbols = machine.tokenize(input)
    return _execute(machine, symbols, draw_stream(np.random.default_rng(seed)), max_steps)


def _run_trials(machine: Machine, symbols: list[str], master_seed: int, indices: range, max_steps: int) -> Counter:
    counts: Counter = Counter()
    for i in indices:
        rng = np.random.default_rng(trial_seed(master_seed, i))
        result = _execute(machine, symbols, draw_stream(rng), max_steps)
        counts[result.output if result.halted else DIVERGENT] += 1
    return counts


def batch_run(
    machine: Machine,
    input: str | Sequence[str],
    trials: int,
    master_seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
    workers: int = 1,
) -> OutputSet:
    """Run ``trials`` independent trials and collect the output multiset.

    Trial ``i`` draws from a stream seeded by ``(master_seed, i)``, so the
    result does not depend on ``workers``. Trials that hit ``max_steps`` are
    counted under :data:`DIVERGENT`.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if master_seed < 0:
        raise ValueError("master_seed must be unsigned")
    _check_bound(max_steps)
    symbols = machine.tokenize(input)
    text = input if isinstance(input, str) else " ".join(input)

    workers = max(1, min(workers, trials))
    if workers == 1:
        total = _run_trials(machine, symbols, master_seed, range(trials), max_steps)
    else:
        bounds = [trials * k // workers for k in range(workers + 1)]
        chunks = [range(a, b) for a, b in zip(bounds, bounds[1:])]
        total = Counter()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(lambda r: _run_trials(machine, symbols, master_seed, r, max_steps), chunks):
                total.update(part)
    return OutputSet(text, dict(total), trials, master_seed)
