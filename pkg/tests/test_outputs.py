from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogaug.outputs import OutputSet, normalized_entropy, randomness, subset_probability

count_maps = st.dictionaries(st.text(min_size=1, max_size=4), st.integers(1, 10_000), min_size=1, max_size=8)


def output_set(counts: dict[str, int]) -> OutputSet:
    return OutputSet("", counts, sum(counts.values()), 0)


def test_output_set_validation():
    with pytest.raises(ValueError):
        OutputSet("", {"a": 1}, 2, 0)
    with pytest.raises(ValueError):
        OutputSet("", {}, 0, 0)
    with pytest.raises(ValueError):
        OutputSet("", {"a": 0, "b": 2}, 2, 0)
    s = output_set({"b": 2, "a": 1})
    assert list(s.counts) == ["a", "b"]
    assert s.cardinality == 2


class TestRandomness:
    def test_single_output(self):
        assert randomness(output_set({"x": 1000})) == 0.0

    @pytest.mark.parametrize("k", [2, 3, 4, 11])
    def test_uniform(self, k):
        assert randomness(output_set({str(i): 37 for i in range(k)})) == 1.0

    def test_coin(self):
        oracle = -(0.7 * math.log2(0.7) + 0.3 * math.log2(0.3)) / math.log2(2)
        assert oracle == pytest.approx(0.8812908992306927, abs=1e-15)
        assert randomness(output_set({"H": 35000, "T": 15000})) == pytest.approx(0.8813, abs=1e-4)
        assert randomness(output_set({"H": 35000, "T": 15000})) == pytest.approx(oracle, abs=1e-12)

    def test_near_uniform_is_below_one(self):
        assert randomness(output_set({"a": 10**9, "b": 10**9 + 1})) < 1.0

    @given(count_maps)
    def test_bounds_and_endpoints(self, counts):
        lam = randomness(output_set(counts))
        assert 0.0 <= lam <= 1.0
        assert (lam == 0.0) == (len(counts) == 1)
        uniform = len(counts) >= 2 and len(set(counts.values())) == 1
        assert (lam == 1.0) == uniform


def test_normalized_entropy_with_zero_entries():
    assert normalized_entropy([5, 0, 0]) == 0.0
    assert normalized_entropy([1, 1, 1]) == 1.0
    assert normalized_entropy([1, 1, 0]) == pytest.approx(math.log(2) / math.log(3))
    with pytest.raises(ValueError):
        normalized_entropy([0, 0])


class TestSubsetProbability:
    def test_all_keys(self):
        s = output_set({"x": 3, "y": 5})
        assert subset_probability(s, {"x", "y"}) == 1.0
        assert subset_probability(s, {"x", "y"}, mode="distinct") == 1.0

    def test_baseline_share(self):
        s = output_set({"x": 27, "y": 61, "z": 12})
        assert subset_probability(s, {"x"}) == 0.27

    def test_modes_diverge(self):
        s = output_set({"x": 90, "y": 5, "z": 5})
        assert subset_probability(s, {"x"}) == 0.90
        assert subset_probability(s, {"x"}, mode="distinct") == pytest.approx(1 / 3)

    def test_unknown_keys_contribute_zero(self):
        s = output_set({"x": 1, "y": 3})
        assert subset_probability(s, {"y", "nope"}) == 0.75
        assert subset_probability(s, {"nope"}) == 0.0

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            subset_probability(output_set({"x": 1}), {"x"}, mode="other")  # type: ignore[arg-type]

    @given(count_maps, st.data())
    def test_partition_sums_to_one(self, counts, data):
        s = output_set(counts)
        labels = data.draw(st.lists(st.integers(0, 3), min_size=len(counts), max_size=len(counts)))
        parts: dict[int, set[str]] = {}
        for key, label in zip(s.counts, labels):
            parts.setdefault(label, set()).add(key)
        exact = [subset_probability(s, p, exact=True) for p in parts.values()]
        assert all(isinstance(x, Fraction) for x in exact)
        assert sum(exact) == 1
        assert math.fsum(subset_probability(s, p) for p in parts.values()) == pytest.approx(1.0, abs=1e-15)
        assert sum(subset_probability(s, p, mode="distinct", exact=True) for p in parts.values()) == 1
