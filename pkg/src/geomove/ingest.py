"""Batch ingestion pipeline: parse, clean, segment, score, geoparse, label,
index.  Produces per-stage counts for the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from .corpus_model import (
    Document,
    Label,
    MalformedRecord,
    Source,
    Statement,
    clean_text,
    parse_record,
    segment_statements,
)
from .geoparser import Gazetteer, geoparse_statement
from .impairment_rules import RuleSet, apply_ruleset, modified_ruleset, pos_tag
from .lexicon import MovementLexicon, default_lexicon
from .movement_scorer import MovementScorerConfig, score_movement
from .search_index import COMMIT_BATCH, SearchIndex


@dataclass
class IngestStats:
    documents: int = 0
    documents_dropped: int = 0
    records_malformed: int = 0
    statements_segmented: int = 0
    movement_statements: int = 0
    statements_with_places: int = 0
    impaired: int = 0

    @property
    def impaired_pct(self) -> float:
        if self.movement_statements == 0:
            return 0.0
        return 100.0 * self.impaired / self.movement_statements

    def lines(self) -> list[str]:
        return [
            f"documents parsed       {self.documents}",
            f"documents dropped      {self.documents_dropped}",
            f"records malformed      {self.records_malformed}",
            f"statements segmented   {self.statements_segmented}",
            f"movement statements    {self.movement_statements}",
            f"with place mentions    {self.statements_with_places}",
            f"labeled impaired       {self.impaired} ({self.impaired_pct:.1f}%)",
        ]


def process_document(
    doc: Document,
    gaz: Gazetteer,
    cfg: MovementScorerConfig,
    rules: RuleSet,
    lexicon: Optional[MovementLexicon] = None,
    stats: Optional[IngestStats] = None,
) -> list[Statement]:
    """Run one document through the full pipeline.

    Returns only the movement statements (score strictly above the
    threshold), geoparsed and labeled.
    """
    lexicon = lexicon if lexicon is not None else cfg.lexicon()
    body = clean_text(doc.body)
    if not body:
        if stats:
            stats.documents_dropped += 1
        return []
    doc = Document(
        doc_id=doc.doc_id,
        source=doc.source,
        published_at=doc.published_at,
        body=body,
        title=doc.title,
        url=doc.url,
    )
    statements = segment_statements(doc)
    if stats:
        stats.documents += 1
        stats.statements_segmented += len(statements)

    kept = []
    for stmt in statements:
        stmt.movement_score = score_movement(stmt.text, lexicon)
        if stmt.movement_score <= cfg.threshold:
            continue
        stmt.places = geoparse_statement(stmt.text, gaz, stmt.source)
        stmt.impaired = apply_ruleset(pos_tag(stmt.text), rules)[0]
        kept.append(stmt)
        if stats:
            stats.movement_statements += 1
            if stmt.places:
                stats.statements_with_places += 1
            if stmt.impaired is Label.IMPAIRED:
                stats.impaired += 1
    return kept


def ingest_files(
    paths: Iterable[str | Path],
    index: SearchIndex,
    gaz: Gazetteer,
    cfg: Optional[MovementScorerConfig] = None,
    rules: Optional[RuleSet] = None,
    source: Optional[Source] = None,
    lenient: bool = False,
    default_date: Optional[datetime] = None,
) -> IngestStats:
    """Ingest line-delimited JSON record files into the index."""
    cfg = cfg or MovementScorerConfig()
    rules = rules or modified_ruleset()
    lexicon = cfg.lexicon()
    stats = IngestStats()
    pending = 0
    if lenient and default_date is None:
        default_date = datetime(2020, 1, 1, tzinfo=timezone.utc)

    for path in paths:
        with Path(path).open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                try:
                    doc = parse_record(line, source, lenient=lenient, default_date=default_date)
                except MalformedRecord:
                    stats.records_malformed += 1
                    continue
                for stmt in process_document(doc, gaz, cfg, rules, lexicon, stats):
                    index.index_statement(stmt)
                    pending += 1
                    if pending >= COMMIT_BATCH:
                        index.commit()
                        pending = 0
    index.commit()
    return stats
