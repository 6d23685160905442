"""Detail-view aggregates: place-pair connections, bi-grams, monthly counts.

Connections are undirected co-occurrence pairs (a statement mentioning
Sydney, New York and London yields three pairs); they show places used
together, not verified movement.  Bi-grams are counted over stopword-filtered
tokens.  The monthly histogram is two-sided: impaired and normal counts
partition each month's matching statements.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Optional, Sequence

from .corpus_model import Label, Statement, tokenize
from .geo_binning import BinScale, statement_bins
from .lexicon import stopwords


class BadRange(ValueError):
    pass


@dataclass(frozen=True)
class PlacePair:
    a: str
    b: str
    weight: int = 1

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("pair endpoints must differ")
        if self.a > self.b:
            raise ValueError("pair endpoints must be canonically ordered")


def make_pair(x: str, y: str, weight: int = 1) -> PlacePair:
    a, b = sorted((x, y))
    return PlacePair(a, b, weight)


def place_pairs(stmt: Statement) -> set[PlacePair]:
    """All unordered pairs over the statement's distinct resolved places;
    duplicate mentions of one place collapse."""
    ids = sorted({str(m.resolved.place_id) for m in stmt.places})
    return {
        PlacePair(ids[i], ids[j])
        for i in range(len(ids))
        for j in range(i + 1, len(ids))
    }


def aggregate_connections(
    stmts: Iterable[Statement],
    scale: BinScale,
    selected_bins: set[str],
) -> list[PlacePair]:
    """Bin-level pairs with distinct-statement weights.

    Pairs whose endpoints fall in the same bin are dropped; only pairs with
    at least one endpoint in the selection are kept.  Sorted by descending
    weight, then endpoints.
    """
    if not selected_bins:
        raise ValueError("selected_bins must be non-empty")
    weights: dict[tuple[str, str], int] = {}
    for stmt in stmts:
        bins = sorted(statement_bins(stmt, scale))
        for i in range(len(bins)):
            for j in range(i + 1, len(bins)):
                if bins[i] in selected_bins or bins[j] in selected_bins:
                    key = (bins[i], bins[j])
                    weights[key] = weights.get(key, 0) + 1
    pairs = [PlacePair(a, b, w) for (a, b), w in weights.items()]
    pairs.sort(key=lambda p: (-p.weight, p.a, p.b))
    return pairs


# ---------------------------------------------------------------------------
# Bi-grams

MAX_BIGRAMS = 20

Bigram = tuple[str, str]


@dataclass(frozen=True)
class BigramCount:
    bigram: Bigram
    count: int


def statement_bigrams(stmt: Statement) -> list[Bigram]:
    """Adjacent pairs over the statement's lowercased alphabetic tokens after
    stopword removal."""
    stop = stopwords()
    tokens = [
        t.lower()
        for t in (stmt.tokens or tokenize(stmt.text))
        if t.isalpha() and t.lower() not in stop
    ]
    return list(zip(tokens, tokens[1:]))


def top_bigrams(
    stmts: Iterable[Statement],
    excluded: frozenset[Bigram] | set[Bigram] = frozenset(),
    limit: int = 10,
) -> list[BigramCount]:
    """Most common bi-grams, ties broken alphabetically, exclusions skipped."""
    if limit < 0 or limit > MAX_BIGRAMS:
        raise ValueError(f"limit {limit} outside [0, {MAX_BIGRAMS}]")
    counts: dict[Bigram, int] = {}
    for stmt in stmts:
        for bigram in statement_bigrams(stmt):
            counts[bigram] = counts.get(bigram, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    out = []
    for bigram, count in ranked:
        if bigram in excluded:
            continue
        out.append(BigramCount(bigram=bigram, count=count))
        if len(out) == limit:
            break
    return out


# ---------------------------------------------------------------------------
# Two-sided monthly histogram

@dataclass(frozen=True)
class TemporalBucket:
    month: str  # "YYYY-MM"
    normal_count: int
    impaired_count: int


def month_key(ts: datetime) -> str:
    return f"{ts.year:04d}-{ts.month:02d}"


def _month_range(t0: datetime, t1: datetime) -> list[str]:
    months = []
    year, month = t0.year, t0.month
    while (year, month) <= (t1.year, t1.month):
        months.append(f"{year:04d}-{month:02d}")
        month += 1
        if month > 12:
            year, month = year + 1, 1
    return months


def temporal_histogram(
    stmts: Iterable[Statement],
    t0: datetime,
    t1: datetime,
) -> list[TemporalBucket]:
    """One bucket per calendar month intersecting [t0, t1], oldest first.
    Months without statements still appear with zero counts."""
    if t0 > t1:
        raise BadRange(f"range start {t0} after end {t1}")
    normal: dict[str, int] = {}
    impaired: dict[str, int] = {}
    for stmt in stmts:
        if not t0 <= stmt.published_at <= t1:
            continue
        key = month_key(stmt.published_at)
        if stmt.impaired is Label.IMPAIRED:
            impaired[key] = impaired.get(key, 0) + 1
        else:
            normal[key] = normal.get(key, 0) + 1
    return [
        TemporalBucket(month=m, normal_count=normal.get(m, 0), impaired_count=impaired.get(m, 0))
        for m in _month_range(t0, t1)
    ]
