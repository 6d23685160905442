"""Embedded inverted index behind the five-way search.

Free text is stemmed; source, movement label, month and per-scale bin
memberships sit in columnar arrays so facets are a bincount away.  A single
writer appends statements and publishes them with commit(); readers always
see the last committed snapshot.  Relevance is summed tf-idf per query stem,
ties broken by recency then statement id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .analytics import TemporalBucket, month_key
from .corpus_model import (
    Label,
    Source,
    Statement,
    statement_from_dict,
    statement_to_dict,
    tokenize,
)
from .geo_binning import (
    ALL_SCALES,
    BinScale,
    COUNTRY,
    ScaleKind,
    parse_scale,
    statement_bins,
)
from .stemmer import stem

FORMAT_VERSION = 1
COMMIT_BATCH = 10_000


class DuplicateId(ValueError):
    pass


class BadQuery(ValueError):
    pass


class IndexNotReady(RuntimeError):
    pass


@dataclass(frozen=True)
class Query:
    text: Optional[str] = None
    sources: frozenset[Source] = frozenset()  # empty means all
    movement_class: frozenset[Label] = frozenset()  # empty means all
    time_range: Optional[tuple[datetime, datetime]] = None
    selected_bins: Optional[tuple[BinScale, frozenset[str]]] = None
    scale: Optional[BinScale] = None  # facet scale; defaults to selection scale or country
    page: int = 0
    page_size: int = 20

    def __post_init__(self):
        if self.page < 0:
            raise BadQuery(f"page {self.page} must be >= 0")
        if not 1 <= self.page_size <= 100:
            raise BadQuery(f"page_size {self.page_size} outside [1, 100]")
        if self.time_range is not None and self.time_range[0] > self.time_range[1]:
            raise BadQuery("time range start after end")

    @property
    def facet_scale(self) -> BinScale:
        if self.scale is not None:
            return self.scale
        if self.selected_bins is not None:
            return self.selected_bins[0]
        return COUNTRY

    def stems(self) -> list[str]:
        if not self.text:
            return []
        return [stem(t.lower()) for t in tokenize(self.text) if t.isalpha()]


@dataclass
class Facets:
    bins: list[tuple[str, int]]
    timeline: list[TemporalBucket]


@dataclass
class ResultPage:
    total: int
    statements: list[Statement]
    facets: Facets


def _month_code(ts: datetime) -> int:
    return ts.year * 12 + ts.month - 1


def _month_name(code: int) -> str:
    return f"{code // 12:04d}-{code % 12 + 1:02d}"


_SOURCE_CODES = {src: i for i, src in enumerate(Source)}
_LABEL_CODES = {None: 0, Label.NORMAL: 0, Label.IMPAIRED: 1}


class SearchIndex:
    """Single-writer, snapshot-reader statement index."""

    def __init__(self, scales: Sequence[BinScale] = ALL_SCALES):
        self.scales = tuple(scales)
        self._stmts: list[Statement] = []
        self._id_to_idx: dict[str, int] = {}
        self._pending: list[Statement] = []
        self._pending_ids: set[str] = set()

        self._postings: dict[str, list[int]] = {}
        self._tf: dict[str, list[int]] = {}
        self._posting_cache: dict[str, tuple[int, np.ndarray, np.ndarray]] = {}

        self._months: list[int] = []
        self._seconds: list[int] = []
        self._sources: list[int] = []
        self._labels: list[int] = []
        self._scores: list[float] = []

        self._bin_codes: dict[BinScale, dict[str, int]] = {s: {} for s in self.scales}
        self._bin_names: dict[BinScale, list[str]] = {s: [] for s in self.scales}
        self._pair_stmt: dict[BinScale, list[int]] = {s: [] for s in self.scales}
        self._pair_bin: dict[BinScale, list[int]] = {s: [] for s in self.scales}
        self._bin_postings: dict[BinScale, dict[str, list[int]]] = {s: {} for s in self.scales}

        self._version = 0
        self._committed = 0
        self._columns: dict[str, np.ndarray] = {}
        self._id_rank: np.ndarray = np.zeros(0, dtype=np.int64)

    # -- writing ------------------------------------------------------------

    def __len__(self) -> int:
        return self._committed

    def index_statement(self, stmt: Statement) -> None:
        """Queue one fully processed statement; visible after commit()."""
        if stmt.stmt_id in self._id_to_idx or stmt.stmt_id in self._pending_ids:
            raise DuplicateId(stmt.stmt_id)
        self._pending.append(stmt)
        self._pending_ids.add(stmt.stmt_id)

    def index_many(self, stmts: Iterable[Statement], batch: int = COMMIT_BATCH) -> int:
        n = 0
        for stmt in stmts:
            self.index_statement(stmt)
            n += 1
            if len(self._pending) >= batch:
                self.commit()
        self.commit()
        return n

    def commit(self) -> None:
        for stmt in self._pending:
            idx = len(self._stmts)
            self._stmts.append(stmt)
            self._id_to_idx[stmt.stmt_id] = idx

            counts: dict[str, int] = {}
            for token in stmt.tokens or tokenize(stmt.text):
                if token.isalpha():
                    s = stem(token.lower())
                    counts[s] = counts.get(s, 0) + 1
            for s, tf in counts.items():
                self._postings.setdefault(s, []).append(idx)
                self._tf.setdefault(s, []).append(tf)

            self._months.append(_month_code(stmt.published_at))
            self._seconds.append(int(stmt.published_at.timestamp()))
            self._sources.append(_SOURCE_CODES[stmt.source])
            self._labels.append(_LABEL_CODES[stmt.impaired])
            self._scores.append(stmt.movement_score if stmt.movement_score is not None else 0.0)

            for scale in self.scales:
                codes = self._bin_codes[scale]
                for bin_id in sorted(statement_bins(stmt, scale)):
                    code = codes.get(bin_id)
                    if code is None:
                        code = len(self._bin_names[scale])
                        codes[bin_id] = code
                        self._bin_names[scale].append(bin_id)
                    self._pair_stmt[scale].append(idx)
                    self._pair_bin[scale].append(code)
                    self._bin_postings[scale].setdefault(bin_id, []).append(idx)

        self._pending.clear()
        self._pending_ids.clear()
        self._committed = len(self._stmts)
        self._columns = {
            "month": np.asarray(self._months, dtype=np.int64),
            "seconds": np.asarray(self._seconds, dtype=np.int64),
            "source": np.asarray(self._sources, dtype=np.int8),
            "label": np.asarray(self._labels, dtype=np.int8),
            "score": np.asarray(self._scores, dtype=np.float64),
        }
        for scale in self.scales:
            self._columns[f"pair_stmt:{scale.kind.value}"] = np.asarray(
                self._pair_stmt[scale], dtype=np.int64
            )
            self._columns[f"pair_bin:{scale.kind.value}"] = np.asarray(
                self._pair_bin[scale], dtype=np.int64
            )
        order = np.argsort(np.asarray(list(self._id_to_idx.keys())))
        rank = np.empty(self._committed, dtype=np.int64)
        rank[order] = np.arange(self._committed)
        self._id_rank = rank
        self._posting_cache.clear()
        self._version += 1

    # -- reading ------------------------------------------------------------

    def _posting_arrays(self, s: str) -> tuple[np.ndarray, np.ndarray]:
        cached = self._posting_cache.get(s)
        if cached is not None and cached[0] == self._version:
            return cached[1], cached[2]
        idx = np.asarray(self._postings.get(s, ()), dtype=np.int64)
        tf = np.asarray(self._tf.get(s, ()), dtype=np.float64)
        keep = idx < self._committed
        idx, tf = idx[keep], tf[keep]
        self._posting_cache[s] = (self._version, idx, tf)
        return idx, tf

    def _base_mask_and_scores(self, q: Query) -> tuple[np.ndarray, np.ndarray]:
        n = self._committed
        scores = np.zeros(n, dtype=np.float64)
        stems = q.stems()
        if stems:
            mask = np.zeros(n, dtype=bool)
            for s in set(stems):
                idx, tf = self._posting_arrays(s)
                if len(idx) == 0:
                    continue
                mask[idx] = True
                idf = np.log((n + 1) / (len(idx) + 1)) + 1.0
                scores[idx] += tf * idf
        else:
            mask = np.ones(n, dtype=bool)

        if q.sources:
            codes = [_SOURCE_CODES[s] for s in q.sources]
            mask &= np.isin(self._columns["source"], codes)
        if q.movement_class:
            codes = [_LABEL_CODES[label] for label in q.movement_class]
            mask &= np.isin(self._columns["label"], codes)
        if q.time_range is not None:
            t0, t1 = (int(t.timestamp()) for t in q.time_range)
            seconds = self._columns["seconds"]
            mask &= (seconds >= t0) & (seconds <= t1)
        return mask, scores

    def _bin_mask(self, q: Query) -> Optional[np.ndarray]:
        if q.selected_bins is None:
            return None
        scale, bins = q.selected_bins
        if scale not in self._bin_postings:
            raise BadQuery(f"scale {scale.kind.value} not indexed")
        mask = np.zeros(self._committed, dtype=bool)
        for bin_id in bins:
            for idx in self._bin_postings[scale].get(bin_id, ()):
                if idx < self._committed:
                    mask[idx] = True
        return mask

    def _order(self, indices: np.ndarray, scores: np.ndarray) -> np.ndarray:
        if len(indices) == 0:
            return indices
        keys = (
            self._id_rank[indices],            # last tie-break: statement id
            -self._columns["seconds"][indices],  # recency
            -scores[indices],                  # primary: relevance
        )
        return indices[np.lexsort(keys)]

    def match_ids(self, q: Query) -> list[str]:
        """Ordered ids of the full match set (all filters applied)."""
        mask, scores = self._base_mask_and_scores(q)
        bin_mask = self._bin_mask(q)
        if bin_mask is not None:
            mask = mask & bin_mask
        ordered = self._order(np.nonzero(mask)[0], scores)
        return [self._stmts[i].stmt_id for i in ordered]

    def matching_statements(self, q: Query) -> list[Statement]:
        mask, scores = self._base_mask_and_scores(q)
        bin_mask = self._bin_mask(q)
        if bin_mask is not None:
            mask = mask & bin_mask
        ordered = self._order(np.nonzero(mask)[0], scores)
        return [self._stmts[i] for i in ordered]

    def search(self, q: Query) -> ResultPage:
        """Match set plus facets.

        The bin facet and timeline are computed before the bin selection is
        applied, so the map keeps showing the pre-selection distribution;
        the statement page honors every filter.
        """
        base_mask, scores = self._base_mask_and_scores(q)
        bin_mask = self._bin_mask(q)
        full_mask = base_mask if bin_mask is None else base_mask & bin_mask

        total = int(full_mask.sum())
        ordered = self._order(np.nonzero(full_mask)[0], scores)
        start = q.page * q.page_size
        page = [self._stmts[i] for i in ordered[start : start + q.page_size]]

        facets = Facets(
            bins=self.facet_bins(base_mask, q.facet_scale),
            timeline=self.facet_timeline(base_mask, q.time_range),
        )
        return ResultPage(total=total, statements=page, facets=facets)

    def facet_bins(self, mask: np.ndarray, scale: BinScale) -> list[tuple[str, int]]:
        if scale not in self._bin_codes:
            raise BadQuery(f"scale {scale.kind.value} not indexed")
        names = self._bin_names[scale]
        if not names:
            return []
        pair_stmt = self._columns[f"pair_stmt:{scale.kind.value}"]
        pair_bin = self._columns[f"pair_bin:{scale.kind.value}"]
        hits = mask[pair_stmt]
        counts = np.bincount(pair_bin[hits], minlength=len(names))
        return [(names[i], int(counts[i])) for i in np.nonzero(counts)[0]]

    def facet_timeline(
        self, mask: np.ndarray, time_range: Optional[tuple[datetime, datetime]]
    ) -> list[TemporalBucket]:
        if self._committed == 0:
            return []
        months = self._columns["month"]
        if time_range is not None:
            lo, hi = (_month_code(t) for t in time_range)
        else:
            lo, hi = int(months.min()), int(months.max())
        span = hi - lo + 1
        if span <= 0:
            return []
        in_range = mask & (months >= lo) & (months <= hi)
        labels = self._columns["label"]
        impaired = np.bincount(months[in_range & (labels == 1)] - lo, minlength=span)
        normal = np.bincount(months[in_range & (labels == 0)] - lo, minlength=span)
        return [
            TemporalBucket(
                month=_month_name(lo + i),
                normal_count=int(normal[i]),
                impaired_count=int(impaired[i]),
            )
            for i in range(span)
        ]

    def statements_for_mask(self, mask: np.ndarray) -> list[Statement]:
        return [self._stmts[i] for i in np.nonzero(mask)[0]]

    def base_match(self, q: Query) -> np.ndarray:
        mask, _ = self._base_mask_and_scores(q)
        return mask

    def full_match(self, q: Query) -> np.ndarray:
        mask, _ = self._base_mask_and_scores(q)
        bin_mask = self._bin_mask(q)
        return mask if bin_mask is None else mask & bin_mask

    @property
    def statements(self) -> list[Statement]:
        return self._stmts[: self._committed]

    # -- persistence ----------------------------------------------------------

    def save(self, index_dir: str | Path) -> None:
        index_dir = Path(index_dir)
        index_dir.mkdir(parents=True, exist_ok=True)
        meta = {
            "format_version": FORMAT_VERSION,
            "count": self._committed,
            "scales": [
                {"kind": s.kind.value, "cell_size": s.cell_size} for s in self.scales
            ],
        }
        (index_dir / "meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
        with (index_dir / "statements.jsonl").open("w", encoding="utf-8") as fh:
            for stmt in self.statements:
                fh.write(json.dumps(statement_to_dict(stmt), sort_keys=True) + "\n")

    @classmethod
    def load(cls, index_dir: str | Path, rebuild: bool = False) -> "SearchIndex":
        index_dir = Path(index_dir)
        meta_path = index_dir / "meta.json"
        if not meta_path.exists():
            raise IndexNotReady(f"no index at {index_dir}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        if meta.get("format_version") != FORMAT_VERSION:
            raise IndexNotReady(
                f"index format {meta.get('format_version')} != {FORMAT_VERSION}; re-ingest"
            )
        scales = tuple(
            BinScale(ScaleKind(s["kind"]), s.get("cell_size")) for s in meta["scales"]
        )
        index = cls(scales=scales)
        with (index_dir / "statements.jsonl").open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                stmt = statement_from_dict(json.loads(line))
                if rebuild:
                    stmt.tokens = tokenize(stmt.text)
                index.index_statement(stmt)
        index.commit()
        return index
