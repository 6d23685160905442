"""Spatial aggregation of statement place mentions into geo-bins.

Five scales: continent, country, admin-1, and two flat-top hexagon grids
laid out in plain lon/lat (plate carree) space.  Hexagon cell sizes are the
circumradius in degrees; distortion grows toward the poles, which is
acceptable for thematic aggregation.  Bin counts are distinct statements: a
statement mentioning two places in one bin counts once there, a statement
mentioning places in two bins counts once in each.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .continents import COUNTRY_TO_CONTINENT
from .corpus_model import Statement
from .geoparser import PlaceMention


class OutOfRange(ValueError):
    pass


class UnknownCountry(KeyError):
    pass


class ScaleKind(Enum):
    CONTINENT = "continent"
    COUNTRY = "country"
    ADMIN1 = "admin1"
    HEX_LARGE = "hex_large"
    HEX_SMALL = "hex_small"


DEFAULT_HEX_LARGE_SIZE = 5.0
DEFAULT_HEX_SMALL_SIZE = 1.25


@dataclass(frozen=True)
class BinScale:
    kind: ScaleKind
    cell_size: Optional[float] = None  # degrees, hex scales only

    def __post_init__(self):
        if self.is_hex:
            if self.cell_size is None or self.cell_size <= 0:
                raise ValueError(f"{self.kind.value} needs a positive cell size")
        elif self.cell_size is not None:
            raise ValueError(f"{self.kind.value} does not take a cell size")

    @property
    def is_hex(self) -> bool:
        return self.kind in (ScaleKind.HEX_LARGE, ScaleKind.HEX_SMALL)


CONTINENT = BinScale(ScaleKind.CONTINENT)
COUNTRY = BinScale(ScaleKind.COUNTRY)
ADMIN1 = BinScale(ScaleKind.ADMIN1)
HEX_LARGE = BinScale(ScaleKind.HEX_LARGE, DEFAULT_HEX_LARGE_SIZE)
HEX_SMALL = BinScale(ScaleKind.HEX_SMALL, DEFAULT_HEX_SMALL_SIZE)

ALL_SCALES = (CONTINENT, COUNTRY, ADMIN1, HEX_LARGE, HEX_SMALL)


def parse_scale(name: str) -> BinScale:
    normalized = name.strip().lower().replace("-", "_")
    for scale in ALL_SCALES:
        if scale.kind.value == normalized:
            return scale
    raise ValueError(f"unknown scale {name!r}")


@dataclass
class GeoBin:
    bin_id: str
    scale: BinScale
    geometry: list[tuple[float, float]]  # closed lon/lat ring
    count: int
    centroid: tuple[float, float]  # lon, lat


# ---------------------------------------------------------------------------
# Hexagon grid (flat-top, axial coordinates "q:r")

_SQRT3 = math.sqrt(3.0)


def _cube_round(qf: float, rf: float) -> tuple[int, int]:
    sf = -qf - rf
    q, r, s = round(qf), round(rf), round(sf)
    dq, dr, ds = abs(q - qf), abs(r - rf), abs(s - sf)
    if dq > dr and dq > ds:
        q = -r - s
    elif dr > ds:
        r = -q - s
    return int(q), int(r)


def assign_hex(lat: float, lon: float, cell_size: float) -> str:
    """Axial hex id "q:r" for a point; rounding is total, so boundary points
    get a deterministic cell."""
    if not -90.0 <= lat <= 90.0:
        raise OutOfRange(f"latitude {lat} out of range")
    if not -180.0 <= lon <= 180.0:
        raise OutOfRange(f"longitude {lon} out of range")
    if cell_size <= 0:
        raise OutOfRange(f"cell size {cell_size} must be positive")
    qf = (2.0 / 3.0) * lon / cell_size
    rf = (-1.0 / 3.0 * lon + _SQRT3 / 3.0 * lat) / cell_size
    q, r = _cube_round(qf, rf)
    return f"{q}:{r}"


def hex_center(bin_id: str, cell_size: float) -> tuple[float, float]:
    q, r = parse_hex_id(bin_id)
    lon = cell_size * 1.5 * q
    lat = cell_size * (_SQRT3 / 2.0 * q + _SQRT3 * r)
    return lon, lat


def hex_polygon(bin_id: str, cell_size: float) -> list[tuple[float, float]]:
    """Closed 7-point lon/lat ring of a flat-top hexagon."""
    cx, cy = hex_center(bin_id, cell_size)
    ring = []
    for i in range(6):
        angle = math.pi / 3.0 * i
        ring.append((cx + cell_size * math.cos(angle), cy + cell_size * math.sin(angle)))
    ring.append(ring[0])
    return ring


def parse_hex_id(bin_id: str) -> tuple[int, int]:
    try:
        q, r = bin_id.split(":")
        return int(q), int(r)
    except ValueError:
        raise ValueError(f"not a hex bin id: {bin_id!r}") from None


# ---------------------------------------------------------------------------
# Administrative bins

class AdminBin(NamedTuple):
    bin_id: str
    coarse: bool  # admin1 requested but only the country was known


def assign_admin(mention: PlaceMention, scale: BinScale) -> AdminBin:
    """Bin id from the mention's gazetteer attributes.

    At admin-1 scale a mention without an admin1 code falls back to its
    country bin, flagged coarse.
    """
    if scale.is_hex:
        raise ValueError("assign_admin takes an administrative scale")
    cc = mention.resolved.country_code
    if cc not in COUNTRY_TO_CONTINENT:
        raise UnknownCountry(cc)
    if scale.kind is ScaleKind.CONTINENT:
        return AdminBin(COUNTRY_TO_CONTINENT[cc], False)
    if scale.kind is ScaleKind.COUNTRY:
        return AdminBin(cc, False)
    admin1 = mention.resolved.admin1_code
    if not admin1:
        return AdminBin(cc, True)
    return AdminBin(f"{cc}.{admin1}", False)


def statement_bins(stmt: Statement, scale: BinScale) -> set[str]:
    """Distinct bin ids touched by a statement's mentions at one scale.

    Mentions whose country is not in the continent table are skipped rather
    than failing the whole aggregation.
    """
    bins: set[str] = set()
    for mention in stmt.places:
        if scale.is_hex:
            bins.add(assign_hex(mention.resolved.lat, mention.resolved.lon, scale.cell_size))
        else:
            try:
                bins.add(assign_admin(mention, scale).bin_id)
            except UnknownCountry:
                continue
    return bins


# ---------------------------------------------------------------------------
# Aggregation

BoundaryIndex = dict[str, list[tuple[float, float]]]


def load_boundaries(path: str | Path) -> BoundaryIndex:
    """Read a GeoJSON feature collection keyed by bin id.

    Features carry `country_code`, optional `admin1_code` and `continent`
    properties; each yields its country / admin-1 / continent ring.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    index: BoundaryIndex = {}
    for feature in data.get("features", []):
        props = feature.get("properties", {})
        geometry = feature.get("geometry", {})
        if geometry.get("type") != "Polygon":
            continue
        ring = [tuple(pt) for pt in geometry["coordinates"][0]]
        cc = props.get("country_code")
        admin1 = props.get("admin1_code")
        continent = props.get("continent")
        if cc and admin1:
            index[f"{cc}.{admin1}"] = ring
        elif cc:
            index[cc] = ring
        elif continent:
            index[continent] = ring
    return index


def _bbox_ring(points: Sequence[tuple[float, float]], pad: float = 0.25) -> list[tuple[float, float]]:
    lons = [p[0] for p in points]
    lats = [p[1] for p in points]
    west, east = min(lons) - pad, max(lons) + pad
    south, north = min(lats) - pad, max(lats) + pad
    return [(west, south), (east, south), (east, north), (west, north), (west, south)]


def aggregate_counts(
    stmts: Iterable[Statement],
    scale: BinScale,
    boundaries: Optional[BoundaryIndex] = None,
) -> list[GeoBin]:
    """Distinct-statement counts per bin; bins with no statements are not
    emitted.  Output is sorted by bin id for determinism."""
    counts: dict[str, int] = {}
    coords: dict[str, list[tuple[float, float]]] = {}
    for stmt in stmts:
        bins = statement_bins(stmt, scale)
        for bin_id in bins:
            counts[bin_id] = counts.get(bin_id, 0) + 1
        for mention in stmt.places:
            point = (mention.resolved.lon, mention.resolved.lat)
            for bin_id in bins:
                if _mention_in_bin(mention, bin_id, scale):
                    coords.setdefault(bin_id, []).append(point)

    out = []
    for bin_id in sorted(counts):
        points = coords.get(bin_id, [])
        if scale.is_hex:
            geometry = hex_polygon(bin_id, scale.cell_size)
            centroid = hex_center(bin_id, scale.cell_size)
        else:
            if boundaries and bin_id in boundaries:
                geometry = list(boundaries[bin_id])
            else:
                geometry = _bbox_ring(points)
            lons = [p[0] for p in points]
            lats = [p[1] for p in points]
            centroid = (sum(lons) / len(lons), sum(lats) / len(lats))
        out.append(GeoBin(bin_id=bin_id, scale=scale, geometry=geometry, count=counts[bin_id], centroid=centroid))
    return out


def _mention_in_bin(mention: PlaceMention, bin_id: str, scale: BinScale) -> bool:
    if scale.is_hex:
        return assign_hex(mention.resolved.lat, mention.resolved.lon, scale.cell_size) == bin_id
    try:
        return assign_admin(mention, scale).bin_id == bin_id
    except UnknownCountry:
        return False
