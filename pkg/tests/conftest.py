from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from geomove.corpus_model import Label, Source, Statement, tokenize
from geomove.geo_binning import statement_bins
from geomove.geoparser import Gazetteer, PlaceMention, geoparse_statement, load_gazetteer
from geomove.impairment_rules import modified_ruleset
from geomove.ingest import ingest_files
from geomove.movement_scorer import MovementScorerConfig
from geomove.search_index import Query, SearchIndex
from geomove.stemmer import stem

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def gazetteer() -> Gazetteer:
    return load_gazetteer(DATA / "gazetteer.tsv")


@pytest.fixture(scope="session")
def e2e_index(gazetteer) -> SearchIndex:
    """The small hand-counted corpus, ingested through the real pipeline."""
    index = SearchIndex()
    ingest_files(
        sorted(DATA.glob("e2e_*.jsonl")),
        index,
        gazetteer,
        MovementScorerConfig(),
        modified_ruleset(),
    )
    return index


# ---------------------------------------------------------------------------
# Synthetic corpus

_VERBS = ["travel", "move", "journey", "march", "flee", "fly", "run", "walk", "head", "return"]
_TOPICS = ["gold", "smuggling", "cricket", "olympics", "cargo", "medicine",
           "wheat", "tourists", "students", "fans"]
_FILLERS = ["quickly", "slowly", "again", "together", "overnight", "yesterday"]
_PLACES = ["Mumbai", "Chennai", "Delhi", "London", "Paris", "Tokyo", "Sydney",
           "Karachi", "Boston", "Madrid", "Milan", "Singapore", "Vancouver", "Colombo"]

_EPOCH = datetime(2019, 8, 1, tzinfo=timezone.utc)
_DAYS = 300


def make_synthetic_statement(i: int, rng: random.Random, gaz: Gazetteer) -> Statement:
    n_places = rng.choice((0, 1, 1, 2, 2, 3))
    places = rng.sample(_PLACES, n_places)
    parts = [rng.choice(_TOPICS), rng.choice(_VERBS)]
    if places:
        parts += ["from", places[0]]
    if len(places) > 1:
        parts += ["to", places[1]]
    if len(places) > 2:
        parts += ["past", places[2]]
    parts.append(rng.choice(_FILLERS))
    text = " ".join(parts)
    source = rng.choice(list(Source))
    published = _EPOCH + timedelta(days=rng.randrange(_DAYS))
    stmt = Statement(
        stmt_id=f"syn{i}",
        doc_id=f"synd{i}",
        source=source,
        published_at=published,
        text=text,
        movement_score=round(rng.uniform(0.61, 1.0), 4),
        impaired=Label.IMPAIRED if rng.random() < 0.28 else Label.NORMAL,
        tokens=tokenize(text),
        url=f"https://example.org/syn/{i}",
    )
    stmt.places = geoparse_statement(text, gaz, source)
    return stmt


def make_synthetic_corpus(n: int, seed: int, gaz: Gazetteer) -> list[Statement]:
    rng = random.Random(seed)
    return [make_synthetic_statement(i, rng, gaz) for i in range(n)]


@pytest.fixture(scope="session")
def synthetic_corpus(gazetteer) -> list[Statement]:
    return make_synthetic_corpus(10_000, seed=20817, gaz=gazetteer)


@pytest.fixture(scope="session")
def synthetic_index(synthetic_corpus) -> SearchIndex:
    index = SearchIndex()
    index.index_many(synthetic_corpus)
    return index


# ---------------------------------------------------------------------------
# Linear-scan oracle mirroring the documented match semantics

def oracle_match_ids(stmts: list[Statement], q: Query) -> set[str]:
    stems = {stem(t.lower()) for t in tokenize(q.text) if t.isalpha()} if q.text else set()
    out = set()
    for s in stmts:
        if stems:
            doc_stems = {stem(t.lower()) for t in s.tokens if t.isalpha()}
            if not doc_stems & stems:
                continue
        if q.sources and s.source not in q.sources:
            continue
        if q.movement_class and (s.impaired or Label.NORMAL) not in q.movement_class:
            continue
        if q.time_range and not (q.time_range[0] <= s.published_at <= q.time_range[1]):
            continue
        if q.selected_bins is not None:
            scale, bins = q.selected_bins
            if not statement_bins(s, scale) & set(bins):
                continue
        out.add(s.stmt_id)
    return out
