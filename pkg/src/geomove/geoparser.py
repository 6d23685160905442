"""Gazetteer-backed toponym recognition and resolution.

Recognition is a longest-match, case-insensitive n-gram lookup (up to four
tokens) against the loaded gazetteer keys.  Resolution picks one entry per
recognized span with a deterministic heuristic: shared country with an
already-resolved mention, then administrative entries over populated places,
then population, then lowest place id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .corpus_model import Source, token_spans


class FileError(OSError):
    pass


class MalformedRow(ValueError):
    pass


class EmptyGold(ValueError):
    pass


@dataclass(frozen=True)
class GazetteerEntry:
    place_id: int
    name: str
    alternate_names: tuple[str, ...]
    lat: float
    lon: float
    feature_class: str  # A = admin region, P = populated place
    country_code: str
    admin1_code: str
    population: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("gazetteer entry has empty name")
        if not -90.0 <= self.lat <= 90.0 or not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"coordinates out of range for {self.name}")
        if self.population < 0:
            raise ValueError(f"negative population for {self.name}")


@dataclass
class PlaceMention:
    start: int
    end: int
    surface: str
    resolved: GazetteerEntry
    confidence: float = 1.0


# Lowercase-only surfaces that are far more often plain words than places.
# Suppressed in cased sources (news, scientific) when not capitalized;
# microblog text skips the check entirely.
AMBIGUOUS_SURFACES = frozenset({"of", "nice", "mobile"})

_MAX_NGRAM = 4


class Gazetteer:
    """In-memory gazetteer indexed by lowercased name and alternate names."""

    def __init__(self, entries: Iterable[GazetteerEntry]):
        self.by_id: dict[int, GazetteerEntry] = {}
        self._by_name: dict[str, list[GazetteerEntry]] = {}
        for entry in entries:
            if entry.place_id in self.by_id:
                raise MalformedRow(f"duplicate place_id {entry.place_id}")
            self.by_id[entry.place_id] = entry
            for name in (entry.name, *entry.alternate_names):
                key = " ".join(name.lower().split())
                if key:
                    self._by_name.setdefault(key, []).append(entry)

    def __len__(self) -> int:
        return len(self.by_id)

    def lookup(self, name: str) -> list[GazetteerEntry]:
        return list(self._by_name.get(" ".join(name.lower().split()), ()))

    def __contains__(self, name: str) -> bool:
        return " ".join(name.lower().split()) in self._by_name


_COLUMNS = 9


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Load a tab-separated gazetteer file.

    Columns: place_id, name, alternate_names (';'-separated), lat, lon,
    feature_class, country_code, admin1_code, population.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read gazetteer {path}: {exc}") from exc

    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != _COLUMNS:
            raise MalformedRow(f"{path} row {lineno}: expected {_COLUMNS} columns, got {len(parts)}")
        try:
            entry = GazetteerEntry(
                place_id=int(parts[0]),
                name=parts[1].strip(),
                alternate_names=tuple(a.strip() for a in parts[2].split(";") if a.strip()),
                lat=float(parts[3]),
                lon=float(parts[4]),
                feature_class=parts[5].strip(),
                country_code=parts[6].strip().upper(),
                admin1_code=parts[7].strip(),
                population=int(parts[8]),
            )
        except ValueError as exc:
            raise MalformedRow(f"{path} row {lineno}: {exc}") from None
        entries.append(entry)
    return Gazetteer(entries)


@dataclass
class ToponymMatch:
    start: int
    end: int
    surface: str
    candidates: list[GazetteerEntry]


def recognize_toponyms(
    text: str, gaz: Gazetteer, source: Optional[Source] = None
) -> list[ToponymMatch]:
    """Longest-match n-gram scan; overlapping and nested matches collapse to
    the longest span, scanning left to right."""
    spans = token_spans(text)
    matches: list[ToponymMatch] = []
    i = 0
    while i < len(spans):
        found = None
        for n in range(min(_MAX_NGRAM, len(spans) - i), 0, -1):
            start = spans[i][0]
            end = spans[i + n - 1][1]
            surface = text[start:end]
            key = " ".join(surface.lower().split())
            candidates = gaz.lookup(key)
            if not candidates:
                continue
            if (
                key in AMBIGUOUS_SURFACES
                and source in (Source.NEWS, Source.SCIENTIFIC)
                and not surface[:1].isupper()
            ):
                continue
            found = ToponymMatch(start=start, end=end, surface=surface, candidates=candidates)
            i += n
            break
        if found is not None:
            matches.append(found)
        else:
            i += 1
    return matches


_FEATURE_RANK = {"A": 0, "P": 1}


def resolve_toponym(
    candidates: Sequence[GazetteerEntry],
    context: Sequence[PlaceMention] = (),
) -> GazetteerEntry:
    """Pick one entry: context country, admin class, population, place_id."""
    if not candidates:
        raise ValueError("no candidates to resolve")
    pool = list(candidates)
    context_countries = {m.resolved.country_code for m in context}
    in_context = [c for c in pool if c.country_code in context_countries]
    if in_context:
        pool = in_context
    pool.sort(
        key=lambda c: (_FEATURE_RANK.get(c.feature_class, 2), -c.population, c.place_id)
    )
    return pool[0]


def geoparse_statement(text: str, gaz: Gazetteer, source: Optional[Source] = None) -> list[PlaceMention]:
    """Recognize and resolve all toponyms in order, feeding each resolved
    mention back in as context for the next."""
    mentions: list[PlaceMention] = []
    for match in recognize_toponyms(text, gaz, source):
        entry = resolve_toponym(match.candidates, mentions)
        mentions.append(
            PlaceMention(
                start=match.start,
                end=match.end,
                surface=match.surface,
                resolved=entry,
                confidence=1.0 / len(match.candidates),
            )
        )
    return mentions


# ---------------------------------------------------------------------------
# Evaluation against a gold corpus

@dataclass
class GoldStatement:
    text: str
    source: Optional[Source] = None
    annotations: list[tuple[int, int, int]] = field(default_factory=list)  # start, end, place_id


def load_gold(path: str | Path) -> list[GoldStatement]:
    gold = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        gold.append(
            GoldStatement(
                text=record["text"],
                source=Source.parse(record["source"]) if record.get("source") else None,
                annotations=[
                    (int(a["start"]), int(a["end"]), int(a["place_id"]))
                    for a in record.get("annotations", [])
                ],
            )
        )
    return gold


@dataclass(frozen=True)
class GeoparserScores:
    precision: float
    recall: float
    f1: float
    resolution_accuracy: float


def evaluate_geoparser(gold: Sequence[GoldStatement], gaz: Gazetteer) -> GeoparserScores:
    """Exact-span recognition scores plus resolution accuracy over the
    correctly recognized spans.  Zero-denominator conventions: 0."""
    if not gold:
        raise EmptyGold("no gold statements")
    tp = fp = fn = 0
    resolved_right = 0
    for gs in gold:
        predicted = geoparse_statement(gs.text, gaz, gs.source)
        pred_spans = {(m.start, m.end): m for m in predicted}
        gold_spans = {(start, end): pid for start, end, pid in gs.annotations}
        for span, mention in pred_spans.items():
            if span in gold_spans:
                tp += 1
                if mention.resolved.place_id == gold_spans[span]:
                    resolved_right += 1
            else:
                fp += 1
        fn += sum(1 for span in gold_spans if span not in pred_spans)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = resolved_right / tp if tp else 0.0
    return GeoparserScores(precision, recall, f1, accuracy)


# ---------------------------------------------------------------------------
# Serialization for the statement store

def gazetteer_entry_to_dict(entry: GazetteerEntry) -> dict:
    return {
        "place_id": entry.place_id,
        "name": entry.name,
        "alternate_names": list(entry.alternate_names),
        "lat": entry.lat,
        "lon": entry.lon,
        "feature_class": entry.feature_class,
        "country_code": entry.country_code,
        "admin1_code": entry.admin1_code,
        "population": entry.population,
    }


def gazetteer_entry_from_dict(data: dict) -> GazetteerEntry:
    return GazetteerEntry(
        place_id=data["place_id"],
        name=data["name"],
        alternate_names=tuple(data.get("alternate_names", ())),
        lat=data["lat"],
        lon=data["lon"],
        feature_class=data["feature_class"],
        country_code=data["country_code"],
        admin1_code=data["admin1_code"],
        population=data["population"],
    )


def place_mention_to_dict(mention: PlaceMention) -> dict:
    return {
        "start": mention.start,
        "end": mention.end,
        "surface": mention.surface,
        "confidence": mention.confidence,
        "resolved": gazetteer_entry_to_dict(mention.resolved),
    }


def place_mention_from_dict(data: dict) -> PlaceMention:
    return PlaceMention(
        start=data["start"],
        end=data["end"],
        surface=data["surface"],
        confidence=data.get("confidence", 1.0),
        resolved=gazetteer_entry_from_dict(data["resolved"]),
    )
