"""Movement-likelihood scoring and threshold filtering.

The scorer interface is a plain callable text -> [0, 1] so a learned model
can be swapped in.  The default is a transparent lexicon heuristic: weighted
counts of movement-verb lemmas, movement adjectives/adverbs and directional
prepositions, squashed by a saturating map calibrated so that a single verb
hit clears the default 0.6 cut-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .corpus_model import Statement, tokenize
from .impairment_rules import lemmatize
from .lexicon import MovementLexicon, default_lexicon, load_lexicon

Scorer = Callable[[str], float]

DEFAULT_THRESHOLD = 0.6

_VERB_WEIGHT = 1.0
_MODIFIER_WEIGHT = 0.5
_PREPOSITION_WEIGHT = 0.25
_SATURATION = 0.5  # score = hits / (hits + _SATURATION); one verb -> 0.67

DIRECTIONAL_PREPOSITIONS = frozenset({"to", "from", "into", "through", "toward"})


@dataclass
class MovementScorerConfig:
    threshold: float = DEFAULT_THRESHOLD
    lexicon_path: Optional[str | Path] = None

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")

    def lexicon(self) -> MovementLexicon:
        if self.lexicon_path is None:
            return default_lexicon()
        return load_lexicon(self.lexicon_path)


def score_movement(stmt_text: str, lexicon: Optional[MovementLexicon] = None) -> float:
    """Deterministic movement score in [0, 1] for a non-empty statement."""
    if not stmt_text:
        raise ValueError("cannot score empty text")
    lex = lexicon if lexicon is not None else default_lexicon()
    hits = 0.0
    for token in tokenize(stmt_text):
        lower = token.lower()
        if lower in DIRECTIONAL_PREPOSITIONS:
            hits += _PREPOSITION_WEIGHT
            continue
        lemma = lemmatize(lower)
        if lemma in lex.verbs:
            hits += _VERB_WEIGHT
        elif lemma in lex.adjectives or lemma in lex.adverbs or lower in lex.adverbs:
            hits += _MODIFIER_WEIGHT
    return hits / (hits + _SATURATION)


def make_lexicon_scorer(lexicon: Optional[MovementLexicon] = None) -> Scorer:
    lex = lexicon if lexicon is not None else default_lexicon()
    return lambda text: score_movement(text, lex)


def filter_movement(
    stmts: Sequence[Statement], cfg: Optional[MovementScorerConfig] = None
) -> list[Statement]:
    """Keep exactly the statements with movement_score strictly greater than
    the threshold, in their original order."""
    cfg = cfg or MovementScorerConfig()
    kept = []
    for stmt in stmts:
        if stmt.movement_score is None:
            raise ValueError(f"statement {stmt.stmt_id} has no movement score")
        if stmt.movement_score > cfg.threshold:
            kept.append(stmt)
    return kept
