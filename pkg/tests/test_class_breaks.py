from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomove.class_breaks import (
    BadK,
    ClassBreaks,
    EmptyInput,
    Method,
    classify,
    compute_breaks,
    parse_method,
)


def brute_force_jenks_cost(values: list[float], k: int) -> float:
    """Enumerate all split placements on sorted data, return the minimal
    total within-class sum of squared deviations."""
    data = sorted(values)
    n = len(data)
    k = min(k, len(set(data)))

    def ssd(chunk):
        mean = sum(chunk) / len(chunk)
        return sum((v - mean) ** 2 for v in chunk)

    best = float("inf")
    for splits in itertools.combinations(range(1, n), k - 1):
        edges = [0, *splits, n]
        cost = sum(ssd(data[a:b]) for a, b in zip(edges, edges[1:]))
        best = min(best, cost)
    return best


def partition_cost(values: list[float], bounds: tuple[float, ...]) -> float:
    data = sorted(values)
    classes: dict[int, list[float]] = {}
    cb = ClassBreaks(method=Method.JENKS, k=max(2, len(bounds) + 1), bounds=bounds)
    for v in data:
        classes.setdefault(classify(v, cb), []).append(v)
    cost = 0.0
    for chunk in classes.values():
        mean = sum(chunk) / len(chunk)
        cost += sum((v - mean) ** 2 for v in chunk)
    return cost


class TestEqualInterval:
    def test_closed_form(self):
        cb = compute_breaks([0, 10, 55, 100], Method.EQUAL_INTERVAL, 4)
        assert cb.bounds == (25.0, 50.0, 75.0)

    def test_alias_parsing(self):
        assert parse_method("equal") is Method.EQUAL_INTERVAL
        assert parse_method("Jenks") is Method.JENKS


class TestQuantile:
    def test_median_split(self):
        cb = compute_breaks(list(range(1, 9)), Method.QUANTILE, 2)
        assert cb.bounds == (4.0,)

    def test_balanced_classes_for_distinct_values(self):
        rng = random.Random(3)
        for _ in range(30):
            n = rng.randint(8, 40)
            k = rng.randint(2, 7)
            values = rng.sample(range(1000), n)
            cb = compute_breaks(values, Method.QUANTILE, k)
            sizes: dict[int, int] = {}
            for v in values:
                c = classify(v, cb)
                sizes[c] = sizes.get(c, 0) + 1
            if len(cb.bounds) == k - 1:  # no dedup kicked in
                assert max(sizes.values()) - min(sizes.values()) <= 1


class TestJenks:
    def test_two_cluster_example(self):
        cb = compute_breaks([1, 2, 3, 10, 11, 12], Method.JENKS, 2)
        assert cb.bounds == (3.0,)

    def test_matches_exhaustive_oracle(self):
        rng = random.Random(40)
        for trial in range(200):
            n = rng.randint(4, 12)
            k = rng.randint(2, 4)
            if rng.random() < 0.3:
                values = [float(rng.randint(0, 9)) for _ in range(n)]  # duplicates likely
            else:
                values = [round(rng.uniform(0, 100), 3) for _ in range(n)]
            cb = compute_breaks(values, Method.JENKS, k)
            oracle = brute_force_jenks_cost(values, k)
            got = partition_cost(values, cb.bounds)
            assert got == pytest.approx(oracle, abs=1e-9), (values, k, cb.bounds)

    def test_k_clamped_to_distinct_values(self):
        cb = compute_breaks([5.0, 5.0, 7.0], Method.JENKS, 4)
        assert cb.bounds == (5.0,)

    def test_deterministic(self):
        values = [3, 1, 4, 1, 5, 9, 2, 6]
        assert compute_breaks(values, Method.JENKS, 3) == compute_breaks(values, Method.JENKS, 3)


class TestStdDeviationAndProgression:
    def test_stddev_bounds_inside_range(self):
        values = [1, 2, 3, 4, 100]
        cb = compute_breaks(values, Method.STD_DEVIATION, 5)
        assert all(1 <= b <= 100 for b in cb.bounds)

    def test_progression_widths_proportional(self):
        cb = compute_breaks([0.0, 60.0], Method.ARITHMETIC_PROGRESSION, 3)
        # widths 10, 20, 30
        assert cb.bounds == (pytest.approx(10.0), pytest.approx(30.0))


class TestClassify:
    def test_min_goes_to_first_class(self):
        cb = compute_breaks([0, 100], Method.EQUAL_INTERVAL, 4)
        assert classify(0, cb) == 0

    def test_max_goes_to_last_class(self):
        cb = compute_breaks([0, 100], Method.EQUAL_INTERVAL, 4)
        assert classify(100, cb) == 3

    def test_boundary_value_goes_to_lower_class(self):
        cb = compute_breaks([0, 100], Method.EQUAL_INTERVAL, 4)
        assert classify(25.0, cb) == 0
        assert classify(25.0000001, cb) == 1

    def test_below_min_clamps_to_zero(self):
        cb = compute_breaks([10, 100], Method.EQUAL_INTERVAL, 3)
        assert classify(-5, cb) == 0

    @given(
        st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=30),
        st.integers(min_value=2, max_value=7),
        st.sampled_from(list(Method)),
    )
    @settings(max_examples=150, deadline=None)
    def test_monotone_nondecreasing(self, values, k, method):
        cb = compute_breaks(values, method, k)
        points = sorted(values) + [min(values) - 1, max(values) + 1]
        classes = [classify(v, cb) for v in sorted(points)]
        assert classes == sorted(classes)
        assert all(0 <= c <= k - 1 for c in classes)


class TestAffineEquivariance:
    @pytest.mark.parametrize("method", [Method.EQUAL_INTERVAL, Method.ARITHMETIC_PROGRESSION])
    def test_affine_transform_maps_bounds(self, method):
        rng = random.Random(9)
        for _ in range(40):
            values = [rng.uniform(-50, 50) for _ in range(rng.randint(2, 20))]
            k = rng.randint(2, 7)
            a = rng.uniform(0.1, 5.0)
            b = rng.uniform(-100, 100)
            base = compute_breaks(values, method, k)
            mapped = compute_breaks([a * v + b for v in values], method, k)
            assert len(base.bounds) == len(mapped.bounds)
            for b0, b1 in zip(base.bounds, mapped.bounds):
                assert b1 == pytest.approx(a * b0 + b, rel=1e-9, abs=1e-9)


class TestErrors:
    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            compute_breaks([], Method.JENKS, 3)

    def test_bad_k(self):
        with pytest.raises(BadK):
            compute_breaks([1, 2, 3], Method.JENKS, 1)
        with pytest.raises(BadK):
            compute_breaks([1, 2, 3], Method.JENKS, 8)

    def test_constant_input_collapses_bounds(self):
        cb = compute_breaks([4.0, 4.0, 4.0], Method.EQUAL_INTERVAL, 4)
        assert classify(4.0, cb) == 0
