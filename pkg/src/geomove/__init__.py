"""geomove: mine, geo-locate, classify and aggregate statements about
geographic movement from heterogeneous text corpora."""

from .analytics import (
    BigramCount,
    PlacePair,
    TemporalBucket,
    aggregate_connections,
    place_pairs,
    temporal_histogram,
    top_bigrams,
)
from .class_breaks import ClassBreaks, Method, classify, compute_breaks
from .corpus_model import (
    Document,
    Label,
    Source,
    Statement,
    clean_text,
    parse_record,
    segment_statements,
)
from .geo_binning import (
    ADMIN1,
    ALL_SCALES,
    CONTINENT,
    COUNTRY,
    HEX_LARGE,
    HEX_SMALL,
    BinScale,
    GeoBin,
    aggregate_counts,
    assign_admin,
    assign_hex,
)
from .geoparser import (
    Gazetteer,
    GazetteerEntry,
    PlaceMention,
    evaluate_geoparser,
    geoparse_statement,
    load_gazetteer,
    recognize_toponyms,
    resolve_toponym,
)
from .impairment_rules import (
    ConfusionMatrix,
    ImpairmentRule,
    RuleSet,
    apply_ruleset,
    baseline_ruleset,
    evaluate,
    metrics,
    modified_ruleset,
    pos_tag,
)
from .movement_scorer import MovementScorerConfig, filter_movement, score_movement
from .search_index import Query, ResultPage, SearchIndex
from .stemmer import stem

__version__ = "0.1.0"
