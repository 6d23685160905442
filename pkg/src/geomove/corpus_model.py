"""Canonical corpus data model: documents, statements, cleaning, segmentation.

Raw records from the three text sources (news, microblog, scientific) are
parsed into Documents, cleaned, and segmented into sentence-level Statements,
the atom every downstream stage (scoring, geoparsing, labeling, indexing)
operates on.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Optional

if TYPE_CHECKING:
    from .geoparser import PlaceMention


class Source(Enum):
    NEWS = "news"
    MICROBLOG = "microblog"
    SCIENTIFIC = "scientific"

    @classmethod
    def parse(cls, value: str) -> "Source":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise MalformedRecord(f"unknown source {value!r}") from None


class Label(Enum):
    NORMAL = "normal"
    IMPAIRED = "impaired"

    @classmethod
    def parse(cls, value: str) -> "Label":
        return cls(value.strip().lower())


class MalformedRecord(ValueError):
    """Record is not one well-formed JSON object with the expected shape."""


class MissingField(MalformedRecord):
    """Record lacks a required field (id, text, date or source)."""


class BadTimestamp(MalformedRecord):
    """published_at is present but not parseable as an ISO-8601 date."""


@dataclass
class Document:
    doc_id: str
    source: Source
    published_at: datetime
    body: str
    title: Optional[str] = None
    url: Optional[str] = None


@dataclass
class Statement:
    stmt_id: str
    doc_id: str
    source: Source
    published_at: datetime
    text: str
    movement_score: Optional[float] = None
    impaired: Optional[Label] = None
    places: list["PlaceMention"] = field(default_factory=list)
    tokens: list[str] = field(default_factory=list)
    url: Optional[str] = None  # parent document's URL, for drill-through


# ---------------------------------------------------------------------------
# Tokenization

# "don't" -> ["do", "n't"]; "cannot" stays one token.  Digits kept so
# statements like "2 flights" still clear the minimum-token rule.
_TOKEN_RE = re.compile(r"[A-Za-z]+(?=n't\b)|n't\b|[A-Za-z]+|\d+(?:\.\d+)?")


def tokenize(text: str) -> list[str]:
    """Word tokens in order, with the n't clitic split off."""
    return _TOKEN_RE.findall(text)


def token_spans(text: str) -> list[tuple[int, int, str]]:
    """(start, end, token) character spans, same tokens as tokenize()."""
    return [(m.start(), m.end(), m.group()) for m in _TOKEN_RE.finditer(text)]


# ---------------------------------------------------------------------------
# Cleaning

_MARKUP_RE = re.compile(r"<[^<>]+>")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_HANDLE_RE = re.compile(r"@\w+")
_RT_RE = re.compile(r"^(?:\s*RT\b:?\s*)+")
_CONTROL_RE = re.compile(r"[\x00-\x1f\x7f-\x9f]")
_WS_RE = re.compile(r"\s+")


def clean_text(raw: str) -> str:
    """Strip markup, URLs, @-handles, RT prefixes and control characters.

    Whitespace is collapsed to single spaces; sentence punctuation and the
    original letter case are preserved.  Empty output means "drop".
    """
    text = _MARKUP_RE.sub("", raw)
    text = _URL_RE.sub(" ", text)
    text = _HANDLE_RE.sub(" ", text)
    text = _CONTROL_RE.sub(" ", text)
    text = _RT_RE.sub("", text)
    return _WS_RE.sub(" ", text).strip()


# ---------------------------------------------------------------------------
# Sentence segmentation

# Abbreviations that end with a period but do not end a sentence.
_ABBREVIATIONS = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "no", "vs", "etc",
    "e.g", "i.e", "cf", "al", "fig", "u.s", "u.k", "a.m", "p.m",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct",
    "nov", "dec",
}

_BOUNDARY_RE = re.compile(r"[.!?]+[\"')\]]*\s+")
_MIN_TOKENS = 3
_MICROBLOG_MAX_LEN = 280


def _is_abbreviation(prefix: str) -> bool:
    word = prefix.rstrip(".").rsplit(" ", 1)[-1].lower().lstrip("(\"'")
    if not word:
        return False
    # Single letters are initials ("J. Smith").
    return len(word) == 1 or word in _ABBREVIATIONS


def split_sentences(text: str) -> list[str]:
    """Split on sentence-final punctuation with abbreviation guards."""
    pieces: list[str] = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        punct = m.group().rstrip()
        # The guard only makes sense for a plain period ("Dr. Smith").
        if punct.rstrip("\"')]") == "." and _is_abbreviation(text[:m.start() + 1]):
            continue
        piece = text[start:m.end()].strip()
        if piece:
            pieces.append(piece)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)
    return pieces


def segment_statements(doc: Document, min_tokens: int = _MIN_TOKENS) -> list[Statement]:
    """One Statement per sentence, in document order; scores and labels unset.

    A short microblog post without sentence-final punctuation is one
    statement.  Fragments with fewer than `min_tokens` tokens are dropped.
    """
    body = doc.body
    if (
        doc.source is Source.MICROBLOG
        and len(body) < _MICROBLOG_MAX_LEN
        and not re.search(r"[.!?]", body)
    ):
        sentences = [body.strip()] if body.strip() else []
    else:
        sentences = split_sentences(body)

    statements = []
    for i, sent in enumerate(sentences):
        tokens = tokenize(sent)
        if len(tokens) < min_tokens:
            continue
        statements.append(
            Statement(
                stmt_id=f"{doc.doc_id}:{i}",
                doc_id=doc.doc_id,
                source=doc.source,
                published_at=doc.published_at,
                text=sent,
                tokens=tokens,
                url=doc.url,
            )
        )
    return statements


# ---------------------------------------------------------------------------
# Record parsing

def _parse_timestamp(value: str) -> datetime:
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, TypeError):
        raise BadTimestamp(f"bad timestamp {value!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_record(
    raw_line: bytes | str,
    source: Optional[Source] = None,
    *,
    lenient: bool = False,
    default_date: Optional[datetime] = None,
) -> Document:
    """Parse one line-delimited JSON record into a Document.

    The record's own `source` field wins over the `source` argument.  A
    malformed timestamp falls back to `default_date` only when `lenient`
    is set, otherwise BadTimestamp is raised.
    """
    if isinstance(raw_line, bytes):
        try:
            raw_line = raw_line.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedRecord("record is not valid UTF-8") from None
    try:
        record = json.loads(raw_line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"record is not valid JSON: {exc}") from None
    if not isinstance(record, dict):
        raise MalformedRecord("record is not a JSON object")

    doc_id = record.get("id")
    if not doc_id:
        raise MissingField("record has no id")
    text = record.get("text")
    if not text:
        raise MissingField(f"record {doc_id} has no text")

    if "source" in record:
        src = Source.parse(record["source"])
    elif source is not None:
        src = source
    else:
        raise MissingField(f"record {doc_id} has no source")

    raw_ts = record.get("published_at")
    if not raw_ts:
        raise MissingField(f"record {doc_id} has no published_at")
    try:
        published = _parse_timestamp(raw_ts)
    except BadTimestamp:
        if lenient and default_date is not None:
            published = default_date
        else:
            raise

    return Document(
        doc_id=str(doc_id),
        source=src,
        published_at=published,
        body=text,
        title=record.get("title"),
        url=record.get("url"),
    )


def read_records(
    lines: Iterable[bytes | str],
    source: Optional[Source] = None,
    **kwargs,
) -> Iterable[Document]:
    for line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        yield parse_record(stripped, source, **kwargs)


# ---------------------------------------------------------------------------
# Statement (de)serialization, used by the on-disk statement store.

def statement_to_dict(stmt: Statement) -> dict:
    from .geoparser import place_mention_to_dict

    return {
        "stmt_id": stmt.stmt_id,
        "doc_id": stmt.doc_id,
        "source": stmt.source.value,
        "published_at": stmt.published_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "text": stmt.text,
        "movement_score": stmt.movement_score,
        "impaired": stmt.impaired.value if stmt.impaired else None,
        "url": stmt.url,
        "places": [place_mention_to_dict(p) for p in stmt.places],
    }


def statement_from_dict(data: dict) -> Statement:
    from .geoparser import place_mention_from_dict

    return Statement(
        stmt_id=data["stmt_id"],
        doc_id=data["doc_id"],
        source=Source(data["source"]),
        published_at=_parse_timestamp(data["published_at"]),
        text=data["text"],
        movement_score=data.get("movement_score"),
        impaired=Label(data["impaired"]) if data.get("impaired") else None,
        places=[place_mention_from_dict(p) for p in data.get("places", [])],
        tokens=tokenize(data["text"]),
        url=data.get("url"),
    )
