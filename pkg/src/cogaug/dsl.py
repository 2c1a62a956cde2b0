"""Line-oriented text formats for machines (``.gim``) and category schemes.

A machine file::

    # coin: write H or T, then halt
    alphabet: H T _
    blank: _
    states: flip done
    start: flip
    halt: done

    flip _ -> H S done @ 0.7
    flip _ -> T S done @ 0.3

Rule lines read ``state read -> write move next @ probability``; consecutive
lines with the same ``(state, read)`` form one stochastic rule, with
outcomes kept in file order. ``#`` starts a comment.
"""

from __future__ import annotations

import math
import re
import shlex
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidMachine
from .gim import PROBABILITY_TOLERANCE, Machine, Move, Outcome, Rule, valid_name
from .metrics import Category, CategoryScheme

_HEADERS = ("alphabet", "blank", "states", "start", "halt")
_SINGLE = {"blank", "start"}
_HEADER_LINE = re.compile(r"\s*([^\s:#]+)\s*:(.*)")
_DECIMAL = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_MOVES = {m.value: m for m in Move}


@dataclass(frozen=True)
class MachineSource:
    text: str
    name: str = "<string>"

    @classmethod
    def from_path(cls, path: str | Path) -> MachineSource:
        path = Path(path)
        return cls(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int
    column: int
    source: str = "<string>"

    def __str__(self) -> str:
        return f"{self.source}:{self.line}:{self.column}: {self.severity}: {self.message}"


class MachineSyntaxError(InvalidMachine):
    """Raised with every diagnostic found, not just the first."""

    def __init__(self, diagnostics: list[ParseDiagnostic]) -> None:
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.severity == "error"]
        super().__init__([str(d) for d in errors])


@dataclass(frozen=True)
class _Token:
    text: str
    column: int


def _tokens(text: str) -> list[_Token]:
    return [_Token(m.group(), m.start() + 1) for m in re.finditer(r"\S+", text)]


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield lineno, line


@dataclass
class _RuleGroup:
    state: _Token
    read: _Token
    line: int
    outcomes: list[Outcome] = field(default_factory=list)
    # (line, write, next) tokens for reference checks
    refs: list[tuple[int, _Token, _Token]] = field(default_factory=list)


class _MachineParser:
    def __init__(self, source: MachineSource) -> None:
        self.source = source
        self.diagnostics: list[ParseDiagnostic] = []
        self.headers: dict[str, tuple[int, list[_Token]]] = {}
        self.groups: list[_RuleGroup] = []
        self.last_line = 1

    def error(self, message: str, line: int, column: int = 1) -> None:
        self.diagnostics.append(ParseDiagnostic("error", message, line, column, self.source.name))

    def warn(self, message: str, line: int, column: int = 1) -> None:
        self.diagnostics.append(ParseDiagnostic("warning", message, line, column, self.source.name))

    def parse(self) -> Machine | None:
        for lineno, line in _content_lines(self.source.text):
            self.last_line = lineno
            header = _HEADER_LINE.fullmatch(line)
            if header:
                self._header(lineno, line, header)
            else:
                self._rule_line(lineno, line)
        self._check_headers()
        self._check_rules()
        if any(d.severity == "error" for d in self.diagnostics):
            return None
        return self._build()

    def _header(self, lineno: int, line: str, match: re.Match) -> None:
        key = match.group(1)
        if key not in _HEADERS:
            self.error(f"unknown header {key!r}", lineno, match.start(1) + 1)
            return
        if self.groups:
            self.error(f"header {key!r} after rule lines", lineno, match.start(1) + 1)
        if key in self.headers:
            self.error(f"duplicate header {key!r} (first on line {self.headers[key][0]})", lineno, match.start(1) + 1)
            return
        offset = match.start(2)
        values = [_Token(t.text, t.column + offset) for t in _tokens(match.group(2))]
        for tok in values:
            if not valid_name(tok.text):
                self.error(f"invalid name {tok.text!r}", lineno, tok.column)
        if key in _SINGLE and len(values) != 1:
            self.error(f"header {key!r} takes exactly one name, got {len(values)}", lineno, match.start(1) + 1)
        if key in ("alphabet", "states") and not values:
            self.error(f"header {key!r} is empty", lineno, match.start(1) + 1)
        seen: set[str] = set()
        for tok in values:
            if tok.text in seen:
                self.error(f"duplicate name {tok.text!r} in {key!r}", lineno, tok.column)
            seen.add(tok.text)
        self.headers[key] = (lineno, values)

    def _rule_line(self, lineno: int, line: str) -> None:
        toks = _tokens(line)
        shape_ok = len(toks) == 8 and toks[2].text == "->" and toks[6].text == "@"
        if not shape_ok:
            col = toks[0].column if toks else 1
            self.error("expected 'state read -> write move next @ probability'", lineno, col)
            return
        state, read, _, write, move, nxt, _, prob = toks
        ok = True
        if move.text not in _MOVES:
            self.error(f"move must be one of L, R, S, got {move.text!r}", lineno, move.column)
            ok = False
        p = None
        if _DECIMAL.fullmatch(prob.text):
            p = float(prob.text)
            if not 0.0 < p <= 1.0:
                self.error(f"probability {prob.text} is not in (0, 1]", lineno, prob.column)
                ok = False
        else:
            self.error(f"invalid probability literal {prob.text!r}", lineno, prob.column)
            ok = False

        group = self.groups[-1] if self.groups else None
        if group is None or (group.state.text, group.read.text) != (state.text, read.text):
            for earlier in self.groups:
                if (earlier.state.text, earlier.read.text) == (state.text, read.text):
                    self.error(
                        f"duplicate rule for ({state.text}, {read.text}); "
                        f"outcomes must be contiguous (first on line {earlier.line})",
                        lineno,
                        state.column,
                    )
                    break
            group = _RuleGroup(state, read, lineno)
            self.groups.append(group)
        group.refs.append((lineno, write, nxt))
        if ok:
            group.outcomes.append(Outcome(write.text, _MOVES[move.text], nxt.text, p))
        else:
            group.outcomes.append(None)  # type: ignore[arg-type]

    def _names(self, key: str) -> set[str]:
        return {t.text for t in self.headers.get(key, (0, []))[1]}

    def _check_headers(self) -> None:
        for key in _HEADERS:
            if key not in self.headers:
                self.error(f"missing header {key!r}", self.last_line)
        alphabet, states = self._names("alphabet"), self._names("states")
        if "blank" in self.headers and "alphabet" in self.headers:
            for tok in self.headers["blank"][1]:
                if tok.text not in alphabet:
                    self.error(f"blank symbol {tok.text!r} is not in the alphabet", self.headers["blank"][0], tok.column)
        if "states" in self.headers:
            for key in ("start", "halt"):
                if key in self.headers:
                    for tok in self.headers[key][1]:
                        if tok.text not in states:
                            self.error(f"undeclared state {tok.text!r}", self.headers[key][0], tok.column)

    def _check_rules(self) -> None:
        alphabet, states, halting = self._names("alphabet"), self._names("states"), self._names("halt")

        def symbol(tok: _Token, line: int) -> None:
            if "alphabet" in self.headers and tok.text not in alphabet:
                self.error(f"undeclared symbol {tok.text!r}", line, tok.column)

        def state(tok: _Token, line: int) -> None:
            if "states" in self.headers and tok.text not in states:
                self.error(f"undeclared state {tok.text!r}", line, tok.column)

        for g in self.groups:
            state(g.state, g.line)
            symbol(g.read, g.line)
            if g.state.text in halting:
                self.error(f"rule keyed on halting state {g.state.text!r}", g.line, g.state.column)
            for line, write, nxt in g.refs:
                symbol(write, line)
                state(nxt, line)
            if all(o is not None for o in g.outcomes):
                total = math.fsum(o.probability for o in g.outcomes)
                if abs(total - 1.0) > PROBABILITY_TOLERANCE:
                    self.error(
                        f"probabilities sum to {total:.12g} for rule ({g.state.text}, {g.read.text})",
                        g.line,
                        g.state.column,
                    )
                elif total != 1.0:
                    self.warn(
                        f"probabilities sum to {total!r} for rule ({g.state.text}, {g.read.text}); within tolerance",
                        g.line,
                        g.state.column,
                    )

    def _build(self) -> Machine | None:
        names = {key: [t.text for t in toks] for key, (_, toks) in self.headers.items()}
        try:
            rules = [Rule(g.state.text, g.read.text, tuple(g.outcomes)) for g in self.groups]
            return Machine(
                names["alphabet"], names["blank"][0], names["states"], names["start"][0], names["halt"], rules
            )
        except InvalidMachine as exc:  # pragma: no cover - every check above should pre-empt this
            for problem in exc.problems:
                self.error(problem, 1)
            return None


def parse_machine_with_diagnostics(source: MachineSource | str) -> tuple[Machine | None, list[ParseDiagnostic]]:
    """Parse a machine, returning it (or None) together with every diagnostic."""
    if isinstance(source, str):
        source = MachineSource(source)
    parser = _MachineParser(source)
    machine = parser.parse()
    diagnostics = sorted(parser.diagnostics, key=lambda d: (d.line, d.column))
    return machine, diagnostics


def parse_machine(source: MachineSource | str) -> Machine:
    machine, diagnostics = parse_machine_with_diagnostics(source)
    if machine is None:
        raise MachineSyntaxError(diagnostics)
    return machine


def load_machine(path: str | Path) -> Machine:
    return parse_machine(MachineSource.from_path(path))


def serialize_machine(machine: Machine) -> str:
    """Canonical text: sorted declarations, rules sorted by (state, read).

    Probabilities are written with ``repr`` so they read back bit-exact.
    """
    lines = [
        "alphabet: " + " ".join(sorted(machine.alphabet)),
        f"blank: {machine.blank}",
        "states: " + " ".join(sorted(machine.states)),
        f"start: {machine.start}",
        " ".join(["halt:", *sorted(machine.halting)]),
    ]
    if machine.rules:
        lines.append("")
    for key in sorted(machine.rules):
        rule = machine.rules[key]
        for o in rule.outcomes:
            lines.append(f"{rule.state} {rule.read} -> {o.write} {o.move.value} {o.next} @ {float(o.probability)!r}")
    return "\n".join(lines) + "\n"


class SchemeSyntaxError(ValueError):
    def __init__(self, errors: list[str]) -> None:
        self.errors = errors
        super().__init__("; ".join(errors))


_SCHEME_LINE = re.compile(r"\s*(category|label)\s+([^\s:#]+)\s*:(.*)|\s*(preferred|catchall)\s*:(.*)")


def parse_scheme(text: str, name: str = "<scheme>") -> CategoryScheme:
    """Read a scheme file.

    ``category ID: member ...`` declares a category (members use shell
    quoting); ``label ID: text`` attaches a description; ``preferred: ID``
    is required; ``catchall: ID`` is optional.
    """
    members: dict[str, list[str]] = {}
    labels: dict[str, str] = {}
    single: dict[str, str] = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw if raw.lstrip().startswith("label") else raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _SCHEME_LINE.fullmatch(line.rstrip())
        if not m:
            errors.append(f"{name}:{lineno}: unrecognized line")
            continue
        if m.group(1) == "category":
            cid = m.group(2)
            if cid in members:
                errors.append(f"{name}:{lineno}: duplicate category {cid!r}")
            try:
                members[cid] = shlex.split(m.group(3))
            except ValueError as exc:
                errors.append(f"{name}:{lineno}: {exc}")
        elif m.group(1) == "label":
            labels[m.group(2)] = m.group(3).strip()
        else:
            key, value = m.group(4), m.group(5).strip()
            if key in single:
                errors.append(f"{name}:{lineno}: duplicate {key!r}")
            single[key] = value
    if "preferred" not in single or not single["preferred"]:
        errors.append(f"{name}: missing 'preferred'")
    if errors:
        raise SchemeSyntaxError(errors)
    try:
        return CategoryScheme(
            [Category(cid, frozenset(ms), labels.get(cid, "")) for cid, ms in members.items()],
            single["preferred"],
            single.get("catchall") or None,
        )
    except ValueError as exc:
        raise SchemeSyntaxError([f"{name}: {exc}"]) from exc


def serialize_scheme(scheme: CategoryScheme) -> str:
    lines = []
    for cat in scheme.categories:
        lines.append(" ".join([f"category {cat.id}:", *(shlex.quote(m) for m in sorted(cat.members))]))
    for cat in scheme.categories:
        if cat.description:
            lines.append(f"label {cat.id}: {cat.description}")
    lines.append(f"preferred: {scheme.preferred}")
    if scheme.catch_all:
        lines.append(f"catchall: {scheme.catch_all}")
    return "\n".join(lines) + "\n"
