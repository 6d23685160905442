from __future__ import annotations

import json
import threading
import urllib.request

import pytest

from geomove.api_service import Service, ServiceConfig, serve
from geomove.corpus_model import Label
from geomove.search_index import SearchIndex

from conftest import DATA


@pytest.fixture(scope="module")
def service(e2e_index) -> Service:
    config = ServiceConfig(
        index_dir="unused",
        boundaries=str(DATA / "boundaries.geojson"),
        cors_allowlist=["https://ui.example.org"],
    )
    return Service(config, index=e2e_index)


class TestSearchEndpoint:
    def test_match_all_totals(self, service, e2e_index):
        status, body = service.handle("/search", {})
        assert status == 200
        assert body["api_version"] == 1
        assert body["total"] == len(e2e_index)

    def test_stemming_matches_variants(self, service):
        status, body = service.handle("/search", {"q": "smuggling"})
        assert status == 200
        assert body["total"] == 9  # smuggling/smuggled variants, not the -er derivation

    def test_facets_timeline_spike(self, service):
        _, body = service.handle("/search", {"q": "smuggling"})
        by_month = {
            t["month"]: t["normal"] + t["impaired"] for t in body["facets"]["timeline"]
        }
        assert by_month["2019-10"] == 7
        assert by_month["2019-09"] == 1
        assert by_month["2019-11"] == 1

    def test_repeated_calls_byte_identical(self, service):
        params = {"q": "gold", "scale": "admin1"}
        first = json.dumps(service.handle("/search", dict(params))[1], sort_keys=True)
        second = json.dumps(service.handle("/search", dict(params))[1], sort_keys=True)
        assert first == second


class TestBinsEndpoint:
    def test_class_indices_in_range(self, service):
        status, body = service.handle("/bins", {"method": "equal", "k": "4"})
        assert status == 200
        assert body["bins"]
        for b in body["bins"]:
            assert 0 <= b["class_index"] <= 3
            assert b["count"] >= 1
            assert b["geometry"][0] == b["geometry"][-1]

    def test_admin1_counts_match_hand_counts(self, service):
        _, body = service.handle("/bins", {"q": "gold", "scale": "admin1"})
        counts = {b["bin_id"]: b["count"] for b in body["bins"]}
        # gold-matching statements: IN.TN mentions in n1..n4, t1, n10
        assert counts["IN.TN"] == 6
        assert counts["IN.MH"] == 5

    def test_boundary_polygon_used(self, service):
        _, body = service.handle("/bins", {"scale": "country"})
        by_id = {b["bin_id"]: b for b in body["bins"]}
        boundaries = json.loads((DATA / "boundaries.geojson").read_text())
        ring = next(
            f["geometry"]["coordinates"][0]
            for f in boundaries["features"]
            if f["properties"].get("country_code") == "IN"
            and "admin1_code" not in f["properties"]
        )
        assert by_id["IN"]["geometry"] == ring


class TestConnectionsEndpoint:
    def test_scenario_connection(self, service):
        status, body = service.handle(
            "/connections", {"q": "gold", "scale": "admin1", "bins": "IN.TN"}
        )
        assert status == 200
        top = body["connections"][0]
        assert (top["a"], top["b"]) == ("IN.MH", "IN.TN")
        assert top["weight"] == 4
        assert top["a_centroid"] is not None
        assert top["b_centroid"] is not None

    def test_requires_bins(self, service):
        status, body = service.handle("/connections", {"q": "gold"})
        assert status == 400


class TestBigramsEndpoint:
    def test_top_bigram(self, service):
        _, body = service.handle(
            "/bigrams", {"q": "gold", "scale": "admin1", "bins": "IN.TN"}
        )
        assert body["bigrams"][0] == {"tokens": ["gold", "smuggling"], "count": 4}

    def test_exclusion_promotes_next(self, service):
        _, full = service.handle(
            "/bigrams", {"q": "gold", "scale": "admin1", "bins": "IN.TN"}
        )
        _, reduced = service.handle(
            "/bigrams",
            {"q": "gold", "scale": "admin1", "bins": "IN.TN", "exclude": "gold:smuggling"},
        )
        assert reduced["bigrams"][0] == full["bigrams"][1]

    def test_limit_cap(self, service):
        status, _ = service.handle("/bigrams", {"limit": "21"})
        assert status == 400


class TestStatementsEndpoint:
    def test_paged_and_filtered(self, service, e2e_index):
        status, body = service.handle(
            "/statements",
            {"q": "smuggling", "movement": "impaired", "page": "0", "page_size": "50"},
        )
        assert status == 200
        assert body["total"] == 3
        for stmt in body["statements"]:
            assert stmt["impaired"] == "impaired"
            assert stmt["url"].startswith("https://example.org/")
            assert stmt["movement_score"] > 0.6

    def test_page_beyond_total_is_empty_200(self, service):
        status, body = service.handle("/statements", {"page": "97"})
        assert status == 200
        assert body["statements"] == []

    def test_bin_filtered_statements_have_mentions_in_bin(self, service):
        _, body = service.handle(
            "/statements", {"scale": "admin1", "bins": "IN.TN", "page_size": "50"}
        )
        assert body["total"] == 7
        for stmt in body["statements"]:
            admin1 = {
                f"{p['country_code']}.TN" if p["name"] in ("Chennai", "Tamil Nadu") else None
                for p in stmt["places"]
            }
            assert "IN.TN" in admin1


class TestErrors:
    def test_unknown_endpoint_404(self, service):
        status, body = service.handle("/nope", {})
        assert status == 404

    def test_bad_query_400(self, service):
        status, body = service.handle("/search", {"k": "4", "page": "-2"})
        assert status == 400
        status, _ = service.handle("/search", {"from": "2020-01-01"})
        assert status == 400
        status, _ = service.handle("/search", {"scale": "postcode"})
        assert status == 400

    def test_index_not_ready_503(self, tmp_path):
        config = ServiceConfig(index_dir=str(tmp_path / "missing"))
        not_ready = Service(config)
        status, body = not_ready.handle("/search", {})
        assert status == 503


class TestHttpServer:
    def test_end_to_end_over_socket(self, service):
        server = serve(
            Service(
                ServiceConfig(
                    index_dir="unused",
                    listen="127.0.0.1:0",
                    cors_allowlist=["https://ui.example.org"],
                ),
                index=service.index,
            )
        )
        host, port = server.server_address[:2]
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            req = urllib.request.Request(
                f"http://{host}:{port}/search?q=smuggling",
                headers={"Origin": "https://ui.example.org"},
            )
            with urllib.request.urlopen(req) as resp:
                assert resp.status == 200
                assert resp.headers["Access-Control-Allow-Origin"] == "https://ui.example.org"
                body = json.loads(resp.read())
            assert body["total"] == 9
            with urllib.request.urlopen(f"http://{host}:{port}/timeline") as resp:
                assert json.loads(resp.read())["buckets"]
        finally:
            server.shutdown()
            server.server_close()
