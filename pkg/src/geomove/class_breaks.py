"""Class-break computation for choropleth-style display of bin counts.

Five methods over 2 to 7 classes.  Breaks are the ascending upper boundaries
of the first k-1 classes; class i holds values <= bounds[i], the last class
runs to the maximum.  Jenks is the exact Fisher-Jenks dynamic program over
the sorted data, not the sampling heuristic, so it can be checked against an
exhaustive-partition oracle.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class Method(Enum):
    JENKS = "jenks"
    EQUAL_INTERVAL = "equal_interval"
    STD_DEVIATION = "std_deviation"
    ARITHMETIC_PROGRESSION = "arithmetic_progression"
    QUANTILE = "quantile"


_METHOD_ALIASES = {
    "jenks": Method.JENKS,
    "natural": Method.JENKS,
    "equal": Method.EQUAL_INTERVAL,
    "equal_interval": Method.EQUAL_INTERVAL,
    "stddev": Method.STD_DEVIATION,
    "std_deviation": Method.STD_DEVIATION,
    "arithmetic": Method.ARITHMETIC_PROGRESSION,
    "arithmetic_progression": Method.ARITHMETIC_PROGRESSION,
    "quantile": Method.QUANTILE,
}

MIN_CLASSES = 2
MAX_CLASSES = 7


class EmptyInput(ValueError):
    pass


class BadK(ValueError):
    pass


def parse_method(name: str) -> Method:
    key = name.strip().lower().replace("-", "_")
    if key not in _METHOD_ALIASES:
        raise ValueError(f"unknown classification method {name!r}")
    return _METHOD_ALIASES[key]


@dataclass(frozen=True)
class ClassBreaks:
    method: Method
    k: int
    bounds: tuple[float, ...]  # ascending upper bounds of classes 0..k-2

    def __post_init__(self):
        if not MIN_CLASSES <= self.k <= MAX_CLASSES:
            raise BadK(f"k={self.k} outside [{MIN_CLASSES}, {MAX_CLASSES}]")
        if any(b0 >= b1 for b0, b1 in zip(self.bounds, self.bounds[1:])):
            raise ValueError("bounds must be strictly ascending")


def compute_breaks(values: Sequence[float], method: Method | str, k: int) -> ClassBreaks:
    if isinstance(method, str):
        method = parse_method(method)
    if not values:
        raise EmptyInput("no values to classify")
    if not MIN_CLASSES <= k <= MAX_CLASSES:
        raise BadK(f"k={k} outside [{MIN_CLASSES}, {MAX_CLASSES}]")
    data = sorted(float(v) for v in values)
    vmin, vmax = data[0], data[-1]

    if method is Method.EQUAL_INTERVAL:
        bounds = [vmin + i * (vmax - vmin) / k for i in range(1, k)]
    elif method is Method.QUANTILE:
        # Nearest-rank quantiles at i/k.
        n = len(data)
        bounds = [data[max(0, -(-i * n // k) - 1)] for i in range(1, k)]
    elif method is Method.STD_DEVIATION:
        mean = statistics.fmean(data)
        sd = statistics.pstdev(data)
        bounds = [min(max(mean + (i - k / 2.0) * sd, vmin), vmax) for i in range(1, k)]
    elif method is Method.ARITHMETIC_PROGRESSION:
        # Interval widths proportional to 1, 2, ..., k.
        total = k * (k + 1) / 2.0
        span = vmax - vmin
        acc, bounds = vmin, []
        for i in range(1, k):
            acc += i * span / total
            bounds.append(acc)
    else:
        bounds = _jenks_bounds(data, k)

    return ClassBreaks(method=method, k=k, bounds=tuple(_dedupe(bounds)))


def _dedupe(bounds: Sequence[float]) -> list[float]:
    out: list[float] = []
    for b in bounds:
        if not out or b > out[-1]:
            out.append(b)
    return out


def _jenks_bounds(data: list[float], k: int) -> list[float]:
    """Exact Fisher-Jenks: minimize total within-class sum of squared
    deviations by dynamic programming over the sorted values."""
    x = np.asarray(data, dtype=float)
    n = len(x)
    k = min(k, len(set(data)))
    if k <= 1:
        return []

    s1 = np.concatenate(([0.0], np.cumsum(x)))
    s2 = np.concatenate(([0.0], np.cumsum(x * x)))

    def seg_cost(i_arr: np.ndarray, j: int) -> np.ndarray:
        # Within-class SSD of x[i..j] for each start index i.
        width = j + 1 - i_arr
        s = s1[j + 1] - s1[i_arr]
        ss = s2[j + 1] - s2[i_arr]
        return ss - s * s / width

    cost = np.full((k, n), np.inf)
    split = np.zeros((k, n), dtype=int)
    idx = np.arange(n)
    cost[0] = s2[1:] - s1[1:] ** 2 / np.arange(1, n + 1)
    for m in range(1, k):
        for j in range(m, n):
            starts = idx[m : j + 1]
            cand = cost[m - 1][starts - 1] + seg_cost(starts, j)
            best = int(np.argmin(cand))
            cost[m][j] = cand[best]
            split[m][j] = starts[best]

    # Walk the splits back; bounds are the max value of each class but the last.
    bounds_rev = []
    j = n - 1
    for m in range(k - 1, 0, -1):
        start = split[m][j]
        bounds_rev.append(x[start - 1])
        j = start - 1
    return [float(b) for b in reversed(bounds_rev)]


def classify(v: float, cb: ClassBreaks) -> int:
    """Class index in [0, k-1]: smallest i with v <= bounds[i], last class
    otherwise.  Values below the minimum clamp to class 0."""
    for i, bound in enumerate(cb.bounds):
        if v <= bound:
            return i
    return len(cb.bounds)
