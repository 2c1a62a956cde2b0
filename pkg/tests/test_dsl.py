from __future__ import annotations

import struct

import pytest
from hypothesis import given, settings

from cogaug.dsl import (
    MachineSource,
    MachineSyntaxError,
    SchemeSyntaxError,
    parse_machine,
    parse_machine_with_diagnostics,
    parse_scheme,
    serialize_machine,
    serialize_scheme,
)
from cogaug.gim import Move, batch_run, run
from cogaug.metrics import Category, CategoryScheme

from conftest import DATA, MACHINES
from strategies import machines

HEADER = "alphabet: 0 1 _\nblank: _\nstates: s h\nstart: s\nhalt: h\n"


def errors(text: str):
    machine, diags = parse_machine_with_diagnostics(MachineSource(text, "t.gim"))
    assert machine is None
    return [d for d in diags if d.severity == "error"]


def test_minimal_machine_is_identity():
    m = parse_machine("alphabet: 0 1 _\nblank: _\nstates: h\nstart: h\nhalt: h\n")
    assert m.rules == {}
    assert run(m, "0110", seed=3).output == "0110"


def test_coin_file(coin):
    rule = coin.rules[("flip", "_")]
    assert [(o.write, o.move, o.next, o.probability) for o in rule.outcomes] == [
        ("H", Move.STAY, "done", 0.7),
        ("T", Move.STAY, "done", 0.3),
    ]
    freqs = batch_run(coin, "", trials=50_000, master_seed=3).frequencies()
    assert abs(freqs["H"] - 0.7) <= 0.01 and abs(freqs["T"] - 0.3) <= 0.01


def test_comments_and_blank_lines():
    text = "# header\n\n" + HEADER.replace("states: s h", "states: s h   # two") + "\ns 0 -> 1 R s @ 1  # flip\n"
    m = parse_machine(text)
    assert m.rules[("s", "0")].outcomes[0].probability == 1.0


def test_probability_sum_error_is_located():
    text = HEADER + "s 0 -> 1 R h @ 0.5\ns 0 -> 0 R h @ 0.6\n"
    [err] = errors(text)
    assert "probabilities sum to 1.1" in err.message
    assert (err.line, err.column) == (6, 1)
    assert str(err).startswith("t.gim:6:1: error:")


def test_all_errors_reported():
    text = (
        "alphabet: 0 1 _\nblank: _\nstates: s h\nstart: q\nhalt: h\n"
        "s 0 -> 2 R h @ 1.0\n"  # undeclared symbol 2
        "s 1 -> 1 X h @ 1.0\n"  # bad move
        "s _ -> _ R z @ 1.0\n"  # undeclared state z
        "h 0 -> 0 R h @ 1.0\n"  # rule on halting state
        "s 0 -> 0 R h @ abc\n"  # bad literal, also a non-contiguous duplicate
        "garbage line\n"
    )
    errs = errors(text)
    messages = " | ".join(e.message for e in errs)
    for fragment in (
        "undeclared state 'q'",
        "undeclared symbol '2'",
        "move must be one of",
        "undeclared state 'z'",
        "halting state 'h'",
        "invalid probability literal",
        "duplicate rule for (s, 0)",
        "expected 'state read",
    ):
        assert fragment in messages
    assert all(e.line >= 1 and e.column >= 1 for e in errs)
    assert [e.line for e in errs] == sorted(e.line for e in errs)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("alphabet: 0 _\nblank: _\nstates: s\nstart: s\n", "missing header 'halt'"),
        (HEADER.replace("blank: _", "blank: x"), "blank symbol 'x'"),
        (HEADER + "alphabet: 0\n", "duplicate header"),
        (HEADER.replace("alphabet: 0 1 _", "alphabet: 0 0 _"), "duplicate name '0'"),
        (HEADER.replace("start: s", "start: s h"), "exactly one name"),
        (HEADER + "foo: bar\n", "unknown header"),
        (HEADER + "s 0 -> 1 R h @ 0\n", "not in (0, 1]"),
        (HEADER + "s 0 -> 1 R h @ 1.5\n", "not in (0, 1]"),
        (HEADER + "s 0 -> 1 R h @ nan\n", "invalid probability literal"),
        (HEADER + "s 0 -> 1 R h @ 0.5\n", "probabilities sum to 0.5"),
        (HEADER.replace("halt: h", "halt: x"), "undeclared state 'x'"),
        (HEADER + "s 0 -> 1 R h @ 1.0\n" + "halt: h\n", "after rule lines"),
    ],
)
def test_rejections(text, fragment):
    errs = errors(text)
    assert errs, "expected at least one error"
    assert any(fragment in e.message for e in errs), [e.message for e in errs]
    with pytest.raises(MachineSyntaxError) as exc:
        parse_machine(text)
    assert exc.value.diagnostics


def test_warning_for_sum_within_tolerance():
    text = HEADER + "s 0 -> 1 R h @ 0.5\ns 0 -> 0 R h @ 0.5000000001\n"
    machine, diags = parse_machine_with_diagnostics(text)
    assert machine is not None
    assert [d.severity for d in diags] == ["warning"]


def test_canonical_fixture_is_byte_stable():
    text = (DATA / "canonical.gim").read_text()
    assert serialize_machine(parse_machine(text)) == text


def test_serialize_sorts_and_round_trips(coin):
    text = serialize_machine(coin)
    assert text.splitlines()[:5] == ["alphabet: H T _", "blank: _", "states: done flip", "start: flip", "halt: done"]
    assert parse_machine(text) == coin


def test_outcome_order_is_preserved():
    text = HEADER + "s 0 -> 1 R h @ 0.3\ns 0 -> 0 R h @ 0.7\n"
    out = serialize_machine(parse_machine(text))
    assert out.endswith("s 0 -> 1 R h @ 0.3\ns 0 -> 0 R h @ 0.7\n")


def _bits(x: float) -> bytes:
    return struct.pack("<d", x)


@given(machines(n_states=(3, 3), n_symbols=(3, 3), full=True))
@settings(max_examples=100)
def test_three_state_six_rule_bit_exact(m):
    assert len(m.rules) >= 3
    back = parse_machine(serialize_machine(m))
    for key, rule in m.rules.items():
        got = back.rules[key]
        assert [_bits(o.probability) for o in got.outcomes] == [_bits(o.probability) for o in rule.outcomes]


@given(machines())
@settings(max_examples=200)
def test_round_trip(m):
    text = serialize_machine(m)
    back = parse_machine(text)
    assert back == m
    assert serialize_machine(back) == text


def test_all_sample_machines_parse():
    for path in MACHINES.glob("*.gim"):
        m = parse_machine(MachineSource.from_path(path))
        assert parse_machine(serialize_machine(m)) == m


class TestScheme:
    def test_parse(self):
        text = (
            "# skeet\ncategory F: f1 'cover the field'\ncategory T: t1\ncategory G:\n"
            "label T: modifying the target # not a comment\npreferred: T\ncatchall: G\n"
        )
        s = parse_scheme(text)
        assert s.ids == ["F", "T", "G"]
        assert s.categories[0].members == {"f1", "cover the field"}
        assert s.categories[1].description == "modifying the target # not a comment"
        assert s.preferred == "T" and s.catch_all == "G"
        assert s.category_of("anything") == "G"

    def test_round_trip(self):
        s = CategoryScheme(
            (Category("T", frozenset({"a b", "c"}), "target"), Category("F", frozenset({"⊥divergent"}))), "T"
        )
        assert parse_scheme(serialize_scheme(s)) == s

    @pytest.mark.parametrize(
        "text",
        [
            "category T: a\n",  # no preferred
            "category T: a\npreferred: X\n",
            "category T: a\ncategory F: a\npreferred: T\n",  # overlapping members
            "category T: a\ncategory T: b\npreferred: T\n",
            "nonsense\npreferred: T\n",
        ],
    )
    def test_rejections(self, text):
        with pytest.raises(SchemeSyntaxError):
            parse_scheme(text)
