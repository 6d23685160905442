"""Read-only HTTP service over a committed index, plus its query surfaces.

Six GET endpoints mirror the query model: /search (totals and facets),
/bins (classified geo-bins with geometry), /connections (classified place
pairs), /bigrams, /timeline, and /statements (paged drill-down with source
URLs).  Responses are pure functions of the index snapshot and the request
parameters; repeated identical calls produce byte-identical bodies.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlsplit

from .analytics import (
    MAX_BIGRAMS,
    aggregate_connections,
    temporal_histogram,
    top_bigrams,
)
from .class_breaks import ClassBreaks, Method, classify, compute_breaks, parse_method
from .corpus_model import Label, Source, Statement
from .geo_binning import (
    BinScale,
    BoundaryIndex,
    hex_center,
    hex_polygon,
    load_boundaries,
)
from .search_index import BadQuery, IndexNotReady, Query, SearchIndex

API_VERSION = 1

ENDPOINTS = ("/search", "/bins", "/connections", "/bigrams", "/timeline", "/statements")

CONFIG_ENV_VAR = "GEOMOVE_CONFIG"


@dataclass
class ServiceConfig:
    index_dir: str
    gazetteer: Optional[str] = None
    boundaries: Optional[str] = None
    lexicon: Optional[str] = None
    rules: Optional[str] = None
    listen: str = "127.0.0.1:8077"
    threshold: float = 0.6
    default_method: str = "equal_interval"
    default_k: int = 5
    cors_allowlist: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")


def load_config(path: str | Path) -> ServiceConfig:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return ServiceConfig(**data)


def resolve_config_path(cli_path: Optional[str]) -> str:
    env = os.environ.get(CONFIG_ENV_VAR)
    if env:
        return env
    if cli_path:
        return cli_path
    raise ValueError(f"no config: pass --config or set {CONFIG_ENV_VAR}")


# ---------------------------------------------------------------------------
# Parameter parsing

def _parse_datetime(value: str, end_of_day: bool) -> datetime:
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise BadQuery(f"bad timestamp {value!r}") from None
    if len(value) == 10 and end_of_day:
        ts = ts.replace(hour=23, minute=59, second=59)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _csv(params: dict[str, str], key: str) -> list[str]:
    raw = params.get(key, "")
    return [part.strip() for part in raw.split(",") if part.strip()]


def _int(params: dict[str, str], key: str, default: int) -> int:
    raw = params.get(key)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise BadQuery(f"{key} must be an integer, got {raw!r}") from None


class Service:
    """Query surface over one committed index snapshot."""

    def __init__(self, config: ServiceConfig, index: Optional[SearchIndex] = None):
        self.config = config
        if index is None:
            try:
                index = SearchIndex.load(config.index_dir)
            except IndexNotReady:
                index = None
        self.index = index
        self.boundaries: BoundaryIndex = (
            load_boundaries(config.boundaries) if config.boundaries else {}
        )
        self._geometry_cache: dict[BinScale, dict[str, dict]] = {}

    @property
    def ready(self) -> bool:
        return self.index is not None and len(self.index) >= 0

    # -- shared helpers ------------------------------------------------------

    def _scale_for(self, kind_name: str) -> BinScale:
        normalized = kind_name.strip().lower().replace("-", "_")
        for scale in self.index.scales:
            if scale.kind.value == normalized:
                return scale
        raise BadQuery(f"unknown scale {kind_name!r}")

    def _parse_query(self, params: dict[str, str]) -> Query:
        sources = frozenset(Source.parse(s) for s in _csv(params, "sources"))
        movement = frozenset(Label.parse(m) for m in _csv(params, "movement"))

        time_range = None
        if params.get("from") or params.get("to"):
            if not (params.get("from") and params.get("to")):
                raise BadQuery("time range needs both from and to")
            time_range = (
                _parse_datetime(params["from"], end_of_day=False),
                _parse_datetime(params["to"], end_of_day=True),
            )

        scale = self._scale_for(params["scale"]) if params.get("scale") else None
        selected = None
        bins = _csv(params, "bins")
        if bins:
            if scale is None:
                raise BadQuery("bin selection needs a scale")
            selected = (scale, frozenset(bins))

        try:
            return Query(
                text=params.get("q") or None,
                sources=sources,
                movement_class=movement,
                time_range=time_range,
                selected_bins=selected,
                scale=scale,
                page=_int(params, "page", 0),
                page_size=_int(params, "page_size", 20),
            )
        except ValueError as exc:
            raise BadQuery(str(exc)) from None

    def _breaks_params(self, params: dict[str, str]) -> tuple[Method, int]:
        method_name = params.get("method", self.config.default_method)
        try:
            method = parse_method(method_name)
        except ValueError as exc:
            raise BadQuery(str(exc)) from None
        k = _int(params, "k", self.config.default_k)
        return method, k

    def _bin_geometry(self, scale: BinScale) -> dict[str, dict]:
        """bin_id -> centroid and polygon ring, derived once per scale from
        the whole corpus (bin shapes do not depend on the query)."""
        cached = self._geometry_cache.get(scale)
        if cached is not None:
            return cached
        out: dict[str, dict] = {}
        if scale.is_hex:
            for bin_id in self.index._bin_names[scale]:
                out[bin_id] = {
                    "centroid": list(hex_center(bin_id, scale.cell_size)),
                    "geometry": [list(p) for p in hex_polygon(bin_id, scale.cell_size)],
                }
        else:
            sums: dict[str, list[float]] = {}
            for stmt in self.index.statements:
                for mention in stmt.places:
                    for bin_id in statement_bins_for_mention(mention, scale):
                        acc = sums.setdefault(bin_id, [0.0, 0.0, 0.0])
                        acc[0] += mention.resolved.lon
                        acc[1] += mention.resolved.lat
                        acc[2] += 1.0
            for bin_id, (lon_sum, lat_sum, n) in sums.items():
                centroid = [lon_sum / n, lat_sum / n]
                if bin_id in self.boundaries:
                    ring = [list(p) for p in self.boundaries[bin_id]]
                else:
                    pad = 0.5
                    ring = [
                        [centroid[0] - pad, centroid[1] - pad],
                        [centroid[0] + pad, centroid[1] - pad],
                        [centroid[0] + pad, centroid[1] + pad],
                        [centroid[0] - pad, centroid[1] + pad],
                        [centroid[0] - pad, centroid[1] - pad],
                    ]
                out[bin_id] = {"centroid": centroid, "geometry": ring}
        self._geometry_cache[scale] = out
        return out

    @staticmethod
    def _breaks_body(breaks: Optional[ClassBreaks]) -> Optional[dict]:
        if breaks is None:
            return None
        return {
            "method": breaks.method.value,
            "k": breaks.k,
            "bounds": list(breaks.bounds),
        }

    @staticmethod
    def _statement_body(stmt: Statement) -> dict:
        return {
            "stmt_id": stmt.stmt_id,
            "doc_id": stmt.doc_id,
            "source": stmt.source.value,
            "published_at": stmt.published_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": stmt.text,
            "movement_score": round(stmt.movement_score, 6)
            if stmt.movement_score is not None
            else None,
            "impaired": stmt.impaired.value if stmt.impaired else None,
            "url": stmt.url,
            "places": [
                {
                    "surface": m.surface,
                    "start": m.start,
                    "end": m.end,
                    "name": m.resolved.name,
                    "lat": m.resolved.lat,
                    "lon": m.resolved.lon,
                    "country_code": m.resolved.country_code,
                }
                for m in stmt.places
            ],
        }

    # -- endpoints -------------------------------------------------------------

    def handle(self, endpoint: str, params: dict[str, str]) -> tuple[int, dict]:
        """Dispatch one request; returns (http_status, response body)."""
        if endpoint not in ENDPOINTS:
            return 404, {"api_version": API_VERSION, "error": f"unknown endpoint {endpoint}"}
        if not self.ready:
            return 503, {"api_version": API_VERSION, "error": "index not ready"}
        try:
            handler = getattr(self, "_handle_" + endpoint.lstrip("/"))
            body = handler(params)
        except BadQuery as exc:
            return 400, {"api_version": API_VERSION, "error": str(exc)}
        body["api_version"] = API_VERSION
        return 200, body

    def _handle_search(self, params: dict[str, str]) -> dict:
        q = self._parse_query(params)
        page = self.index.search(q)
        return {
            "total": page.total,
            "page": q.page,
            "page_size": q.page_size,
            "facets": {
                "scale": q.facet_scale.kind.value,
                "bins": [{"bin_id": b, "count": c} for b, c in page.facets.bins],
                "timeline": [
                    {
                        "month": t.month,
                        "normal": t.normal_count,
                        "impaired": t.impaired_count,
                    }
                    for t in page.facets.timeline
                ],
            },
        }

    def _handle_bins(self, params: dict[str, str]) -> dict:
        q = self._parse_query(params)
        method, k = self._breaks_params(params)
        scale = q.facet_scale
        counts = self.index.facet_bins(self.index.base_match(q), scale)
        geometry = self._bin_geometry(scale)
        breaks = None
        if counts:
            try:
                breaks = compute_breaks([c for _, c in counts], method, k)
            except ValueError as exc:
                raise BadQuery(str(exc)) from None
        bins = []
        for bin_id, count in counts:
            shape = geometry.get(bin_id, {"centroid": None, "geometry": None})
            bins.append(
                {
                    "bin_id": bin_id,
                    "count": count,
                    "class_index": classify(count, breaks) if breaks else 0,
                    "centroid": shape["centroid"],
                    "geometry": shape["geometry"],
                }
            )
        return {"scale": scale.kind.value, "breaks": self._breaks_body(breaks), "bins": bins}

    def _handle_connections(self, params: dict[str, str]) -> dict:
        q = self._parse_query(params)
        if q.selected_bins is None:
            raise BadQuery("connections need selected bins")
        method, k = self._breaks_params(params)
        scale, selected = q.selected_bins
        stmts = self.index.statements_for_mask(self.index.full_match(q))
        pairs = aggregate_connections(stmts, scale, set(selected))
        breaks = None
        if pairs:
            try:
                breaks = compute_breaks([p.weight for p in pairs], method, k)
            except ValueError as exc:
                raise BadQuery(str(exc)) from None
        geometry = self._bin_geometry(scale)
        connections = []
        for pair in pairs:
            connections.append(
                {
                    "a": pair.a,
                    "b": pair.b,
                    "weight": pair.weight,
                    "class_index": classify(pair.weight, breaks) if breaks else 0,
                    "a_centroid": geometry.get(pair.a, {}).get("centroid"),
                    "b_centroid": geometry.get(pair.b, {}).get("centroid"),
                }
            )
        return {
            "scale": scale.kind.value,
            "breaks": self._breaks_body(breaks),
            "connections": connections,
        }

    def _handle_bigrams(self, params: dict[str, str]) -> dict:
        q = self._parse_query(params)
        limit = _int(params, "limit", 10)
        if limit < 0 or limit > MAX_BIGRAMS:
            raise BadQuery(f"limit {limit} outside [0, {MAX_BIGRAMS}]")
        excluded = set()
        for item in _csv(params, "exclude"):
            parts = item.split(":")
            if len(parts) != 2 or not all(parts):
                raise BadQuery(f"bad excluded bigram {item!r}; expected tok1:tok2")
            excluded.add((parts[0].lower(), parts[1].lower()))
        stmts = self.index.statements_for_mask(self.index.full_match(q))
        ranked = top_bigrams(stmts, frozenset(excluded), limit)
        return {
            "bigrams": [
                {"tokens": [b.bigram[0], b.bigram[1]], "count": b.count} for b in ranked
            ]
        }

    def _handle_timeline(self, params: dict[str, str]) -> dict:
        q = self._parse_query(params)
        buckets = self.index.facet_timeline(self.index.base_match(q), q.time_range)
        return {
            "buckets": [
                {"month": t.month, "normal": t.normal_count, "impaired": t.impaired_count}
                for t in buckets
            ]
        }

    def _handle_statements(self, params: dict[str, str]) -> dict:
        q = self._parse_query(params)
        page = self.index.search(q)
        return {
            "total": page.total,
            "page": q.page,
            "page_size": q.page_size,
            "statements": [self._statement_body(s) for s in page.statements],
        }


def statement_bins_for_mention(mention, scale: BinScale) -> set[str]:
    """Bins one mention maps to (a singleton set, or empty when the country
    is unknown); used to attribute coordinates to admin bins."""
    from .geo_binning import UnknownCountry, assign_admin, assign_hex

    if scale.is_hex:
        return {assign_hex(mention.resolved.lat, mention.resolved.lon, scale.cell_size)}
    try:
        return {assign_admin(mention, scale).bin_id}
    except UnknownCountry:
        return set()


# ---------------------------------------------------------------------------
# HTTP wrapper

def _make_handler(service: Service):
    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):  # noqa: N802  (stdlib naming)
            parsed = urlsplit(self.path)
            params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
            status, body = service.handle(parsed.path, params)
            payload = json.dumps(body, sort_keys=True).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(payload)))
            origin = self.headers.get("Origin")
            allow = service.config.cors_allowlist
            if origin and ("*" in allow or origin in allow):
                self.send_header("Access-Control-Allow-Origin", origin)
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):  # silence request logging
            pass

    return Handler


def serve(service: Service) -> ThreadingHTTPServer:
    """Start the HTTP server on the configured address; returns the server
    (caller owns serve_forever / shutdown)."""
    host, _, port = service.config.listen.partition(":")
    server = ThreadingHTTPServer((host, int(port or "8077")), _make_handler(service))
    return server


def serve_forever(service: Service) -> None:
    server = serve(service)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
