"""Acceptance suite: one test per release criterion, each printing a
pass/fail line (run with `pytest -s tests/test_acceptance.py` to see them)."""

from __future__ import annotations

import itertools
import json
import random
import time
from contextlib import contextmanager
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
import shapely

from conftest import DATA, make_synthetic_corpus, oracle_match_ids
from geomove.analytics import place_pairs, temporal_histogram
from geomove.api_service import Service, ServiceConfig
from geomove.class_breaks import Method, classify, compute_breaks
from geomove.corpus_model import Label, Source, Statement, tokenize
from geomove.geo_binning import assign_hex, hex_polygon
from geomove.geoparser import evaluate_geoparser, load_gold
from geomove.impairment_rules import (
    ConfusionMatrix,
    apply_ruleset,
    baseline_ruleset,
    evaluate,
    metrics,
    modified_ruleset,
    pos_tag,
)
from geomove.ingest import ingest_files
from geomove.movement_scorer import MovementScorerConfig
from geomove.search_index import Query, SearchIndex

from test_class_breaks import brute_force_jenks_cost, partition_cost

UTC = timezone.utc


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except Exception:
        print(f"[FAIL] criterion {number:2d}: {description}")
        raise
    print(f"[PASS] criterion {number:2d}: {description}")


def test_criterion_01_metric_arithmetic():
    with criterion(1, "reported-sample metric arithmetic at 2-decimal rounding"):
        precision, recall, f1, accuracy = metrics(ConfusionMatrix(23, 27, 8, 42))
        assert round(precision, 2) == 0.46
        assert round(recall, 2) == 0.74
        assert round(f1, 2) == 0.57
        assert round(accuracy, 2) == 0.65


def test_criterion_02_ruleset_delta():
    with criterion(2, "modified rule set = baseline - prefixes + impairment lemmas"):
        base = baseline_ruleset().rule_ids()
        modified = modified_ruleset().rule_ids()
        removed = {
            "verbprefix:de", "verbprefix:mis", "verbprefix:dis",
            "adjprefix:a", "adjprefix:dis",
        }
        added = {"lemma:cancel", "lemma:postpone", "lemma:prevent", "lemma:avoid"}
        assert removed <= base
        assert added.isdisjoint(base)
        assert modified == (base - removed) | added


def test_criterion_03_rule_improvement():
    with criterion(3, "modified rules beat baseline F1 on the bundled 100-statement sample"):
        rows = [
            json.loads(line)
            for line in (DATA / "impairment_gold.jsonl").read_text().splitlines()
        ]
        assert len(rows) == 100
        gold = [Label.parse(r["label"]) for r in rows]
        f1_by_set = {}
        for rs in (baseline_ruleset(), modified_ruleset()):
            pred = [apply_ruleset(pos_tag(r["text"]), rs)[0] for r in rows]
            f1_by_set[rs.name] = metrics(evaluate(pred, gold))[2]
        assert f1_by_set["modified"] > f1_by_set["baseline"]


def test_criterion_04_pair_combinatorics(gazetteer):
    with criterion(4, "place pairs equal m(m-1)/2 brute force; the 3-city example gives 3 pairs"):
        from geomove.geoparser import PlaceMention

        rng = random.Random(17)
        pool = [gazetteer.by_id[i] for i in (4, 5, 13, 14, 19, 20)]
        for _ in range(100):
            m = rng.randint(0, 6)
            chosen = rng.sample(pool, m)
            stmt = Statement(
                stmt_id="x", doc_id="x", source=Source.NEWS,
                published_at=datetime(2020, 1, 1, tzinfo=UTC), text="x",
                places=[
                    PlaceMention(0, len(e.name), e.name, e) for e in chosen
                ],
            )
            pairs = place_pairs(stmt)
            assert len(pairs) == m * (m - 1) // 2
            brute = {
                tuple(sorted((str(a.place_id), str(b.place_id))))
                for a, b in itertools.combinations(chosen, 2)
            }
            assert {(p.a, p.b) for p in pairs} == brute

        three = [gazetteer.lookup(n)[0] for n in ("Sydney", "New York", "London")]
        stmt = Statement(
            stmt_id="y", doc_id="y", source=Source.NEWS,
            published_at=datetime(2020, 1, 1, tzinfo=UTC), text="y",
            places=[PlaceMention(0, len(e.name), e.name, e) for e in three],
        )
        assert len(place_pairs(stmt)) == 3


def test_criterion_05_class_break_oracles():
    with criterion(5, "Jenks equals the exhaustive-partition oracle; closed forms hold; classify monotone"):
        rng = random.Random(40)
        for _ in range(200):
            n = rng.randint(4, 12)
            k = rng.randint(2, 4)
            values = (
                [float(rng.randint(0, 9)) for _ in range(n)]
                if rng.random() < 0.3
                else [round(rng.uniform(0, 100), 3) for _ in range(n)]
            )
            cb = compute_breaks(values, Method.JENKS, k)
            assert partition_cost(values, cb.bounds) == pytest.approx(
                brute_force_jenks_cost(values, k), abs=1e-9
            )

        cb = compute_breaks([0, 10, 55, 100], Method.EQUAL_INTERVAL, 4)
        assert cb.bounds == (25.0, 50.0, 75.0)
        cb = compute_breaks(list(range(1, 9)), Method.QUANTILE, 2)
        assert cb.bounds == (4.0,)

        for _ in range(50):
            values = [rng.uniform(-100, 100) for _ in range(rng.randint(2, 40))]
            k = rng.randint(2, 7)
            cb = compute_breaks(values, rng.choice(list(Method)), k)
            classes = [classify(v, cb) for v in sorted(values)]
            assert classes == sorted(classes)
            assert all(0 <= c <= k - 1 for c in classes)


def test_criterion_06_hex_tessellation():
    with criterion(6, "hexes tessellate: unique assignment, covering, disjoint interiors, stable"):
        rng = random.Random(23)
        cell = 5.0
        points = [(rng.uniform(-20, 20), rng.uniform(-30, 30)) for _ in range(10_000)]
        assigned: dict[str, list[tuple[float, float]]] = {}
        for lat, lon in points:
            assigned.setdefault(assign_hex(lat, lon, cell), []).append((lat, lon))

        polygons = {
            bin_id: shapely.Polygon(hex_polygon(bin_id, cell)) for bin_id in assigned
        }
        # Every point is covered by its own (closed) hexagon.
        for bin_id, pts in assigned.items():
            closed = polygons[bin_id].buffer(1e-9)
            xs = np.array([lon for _, lon in pts])
            ys = np.array([lat for lat, _ in pts])
            assert shapely.contains_xy(closed, xs, ys).all()
        # Interiors are pairwise disjoint.
        ids = sorted(polygons)
        for a, b in itertools.combinations(ids, 2):
            if polygons[a].distance(polygons[b]) > 0:
                continue
            assert polygons[a].intersection(polygons[b]).area < 1e-9
        # Determinism under 1e-9 degree perturbation away from edges.
        checked = 0
        for lat, lon in points[:2000]:
            bin_id = assign_hex(lat, lon, cell)
            boundary = polygons[bin_id].exterior
            if boundary.distance(shapely.Point(lon, lat)) < 1e-6:
                continue
            checked += 1
            for dlat, dlon in ((1e-9, 0), (-1e-9, 0), (0, 1e-9), (0, -1e-9)):
                assert assign_hex(lat + dlat, lon + dlon, cell) == bin_id
        assert checked > 1500


def test_criterion_07_search_oracle(synthetic_corpus, synthetic_index):
    with criterion(7, "50 randomized queries equal the linear-scan oracle on 10k statements"):
        from test_search_index import random_query

        rng = random.Random(99)
        for _ in range(50):
            q = random_query(rng, synthetic_index)
            assert set(synthetic_index.match_ids(q)) == oracle_match_ids(synthetic_corpus, q)

        variants = ["smuggle", "smuggled", "smuggling"]
        results = [set(synthetic_index.match_ids(Query(text=v))) for v in variants]
        assert results[0] == results[1] == results[2] and results[0]


@pytest.fixture(scope="module")
def pipeline_service(gazetteer, tmp_path_factory) -> Service:
    """A corpus pushed through the full ingest pipeline (cleaning, scoring,
    threshold filter, geoparsing, labeling) under the default config."""
    rng = random.Random(31)
    movers = ["travel", "moved", "marched", "journey", "fled", "walked"]
    still = ["stayed in", "met in", "liked", "discussed", "praised", "painted"]
    places = ["Mumbai", "Chennai", "London", "Paris", "Tokyo", "Sydney", "Karachi", "Delhi"]
    negs = ["", "", "not ", "never "]
    records = []
    for i in range(600):
        a, b = rng.sample(places, 2)
        if rng.random() < 0.5:
            text = f"The {rng.choice(['team', 'crew', 'group'])} {rng.choice(movers)} "
            text += f"{rng.choice(negs)}from {a} to {b}."
        else:
            text = f"Critics {rng.choice(still)} {a} again this week."
        day = datetime(2019, 8, 1, tzinfo=UTC) + timedelta(days=rng.randrange(250))
        records.append({
            "id": f"p{i}",
            "source": rng.choice(["news", "microblog", "scientific"]),
            "published_at": day.strftime("%Y-%m-%d"),
            "text": text,
            "url": f"https://example.org/p/{i}",
        })
    tmp = tmp_path_factory.mktemp("pipeline")
    corpus_path = tmp / "corpus.jsonl"
    corpus_path.write_text("".join(json.dumps(r) + "\n" for r in records))
    index = SearchIndex()
    ingest_files([corpus_path], index, gazetteer, MovementScorerConfig(), modified_ruleset())
    assert 0 < len(index) < 600
    return Service(ServiceConfig(index_dir="unused"), index=index)


def test_criterion_08_threshold_filter(pipeline_service):
    with criterion(8, "no statement at or below the 0.6 score ever appears in an API response"):
        index = pipeline_service.index
        assert all(s.movement_score > 0.6 for s in index.statements)
        param_sets = [
            {},
            {"q": "travel"},
            {"movement": "impaired"},
            {"movement": "normal"},
            {"sources": "news,microblog"},
            {"from": "2019-08-01", "to": "2019-12-31"},
            {"scale": "country", "bins": "IN"},
            {"scale": "admin1", "bins": "IN.TN,IN.MH"},
        ]
        seen = 0
        for params in param_sets:
            for page in range(4):
                call = {**params, "page": str(page), "page_size": "100"}
                status, body = pipeline_service.handle("/statements", call)
                assert status == 200
                for stmt in body["statements"]:
                    assert stmt["movement_score"] > 0.6
                    seen += 1
        assert seen > 100


def test_criterion_09_histogram_conservation(synthetic_corpus, synthetic_index):
    with criterion(9, "per month normal + impaired = matching statements; months sum to total"):
        t0 = datetime(2019, 8, 1, tzinfo=UTC)
        t1 = datetime(2020, 5, 31, tzinfo=UTC)
        buckets = temporal_histogram(synthetic_corpus, t0, t1)
        for bucket in buckets:
            month_total = sum(
                1
                for s in synthetic_corpus
                if t0 <= s.published_at <= t1
                and s.published_at.strftime("%Y-%m") == bucket.month
            )
            assert bucket.normal_count + bucket.impaired_count == month_total
        in_range = sum(1 for s in synthetic_corpus if t0 <= s.published_at <= t1)
        assert sum(b.normal_count + b.impaired_count for b in buckets) == in_range

        # Same conservation through the index facet path, with a text filter.
        q = Query(text="gold", time_range=(t0, t1))
        page = synthetic_index.search(q)
        assert sum(b.normal_count + b.impaired_count for b in page.facets.timeline) == page.total


def test_criterion_10_search_latency(gazetteer):
    with criterion(10, "p95 /search under 100 ms at 100k indexed statements"):
        corpus = make_synthetic_corpus(100_000, seed=5150, gaz=gazetteer)
        index = SearchIndex()
        index.index_many(corpus)
        assert len(index) == 100_000
        service = Service(ServiceConfig(index_dir="unused"), index=index)

        param_sets = [
            {},
            {"q": "smuggling"},
            {"q": "gold cargo olympics"},
            {"q": "travel", "sources": "news"},
            {"movement": "impaired", "scale": "hex_large"},
            {"from": "2019-09-01", "to": "2020-02-29", "scale": "admin1"},
            {"q": "wheat", "scale": "country", "bins": "IN,GB"},
            {"q": "students", "scale": "hex_small"},
        ]
        # Warm-up pass, then measure.
        for params in param_sets:
            status, _ = service.handle("/search", dict(params))
            assert status == 200
        times = []
        for round_ in range(10):
            for params in param_sets:
                start = time.perf_counter()
                status, _ = service.handle("/search", dict(params))
                times.append(time.perf_counter() - start)
                assert status == 200
        p95 = float(np.percentile(times, 95))
        print(f"  /search p95 = {p95 * 1000:.1f} ms over {len(times)} calls")
        assert p95 < 0.100


def test_criterion_11_geoparser_targets(gazetteer):
    with criterion(11, "recognition F1 >= 0.90 and resolution accuracy >= 0.90 on gold corpus"):
        scores = evaluate_geoparser(load_gold(DATA / "geoparser_gold.jsonl"), gazetteer)
        assert scores.f1 >= 0.90
        assert scores.resolution_accuracy >= 0.90


def test_criterion_12_end_to_end_scenario(e2e_index):
    with criterion(12, "gold-smuggling scenario: state connection, top bigram, monthly spike"):
        service = Service(
            ServiceConfig(index_dir="unused", boundaries=str(DATA / "boundaries.geojson")),
            index=e2e_index,
        )
        status, search = service.handle("/search", {"q": "smuggling", "scale": "admin1"})
        assert status == 200
        assert search["total"] == 9
        by_month = {
            t["month"]: t["normal"] + t["impaired"] for t in search["facets"]["timeline"]
        }
        assert by_month["2019-10"] == 7  # the spike month
        assert max(by_month, key=by_month.get) == "2019-10"

        status, conn = service.handle(
            "/connections", {"q": "gold", "scale": "admin1", "bins": "IN.TN"}
        )
        assert status == 200
        weights = {(c["a"], c["b"]): c["weight"] for c in conn["connections"]}
        assert weights[("IN.MH", "IN.TN")] == 4
        assert weights[("IN.TN", "PK.SD")] == 1
        assert weights[("IN.TN", "SG")] == 1

        status, bigrams = service.handle(
            "/bigrams", {"q": "gold", "scale": "admin1", "bins": "IN.TN"}
        )
        assert bigrams["bigrams"][0] == {"tokens": ["gold", "smuggling"], "count": 4}

        status, stmts = service.handle(
            "/statements", {"q": "gold", "scale": "admin1", "bins": "IN.TN", "page_size": "50"}
        )
        assert stmts["total"] == 6
        assert all(s["movement_score"] > 0.6 for s in stmts["statements"])
