"""Rule-based detection of impaired movement.

Statements get POS-tagged by a deterministic lexicon-and-suffix tagger, then
a declarative rule set marks them Normal or Impaired.  Two canonical rule
sets ship as versioned data files: a baseline built from general negation
cues (exact words, verb prefixes de/mis/dis, adjective prefixes a/dis, the
-less suffix) and a modified set that drops the prefix rules and adds the
cancel/postpone/prevent/avoid lemmas.  An evaluation harness computes the
confusion matrix and precision/recall/F1/accuracy against labeled samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .corpus_model import Label, tokenize
from .lexicon import (
    COMMON_ADJECTIVES,
    COMMON_NOUNS,
    COMMON_VERBS,
    FUNCTION_WORDS,
    IRREGULAR_VERBS,
    default_lexicon,
)


class Pos(Enum):
    VERB = "verb"
    NOUN = "noun"
    ADJECTIVE = "adj"
    ADVERB = "adv"
    OTHER = "other"


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lemma: str
    pos: Pos


class MatchKind(Enum):
    EXACT_WORD = "exact"
    PREFIX = "prefix"
    SUFFIX = "suffix"
    LEMMA = "lemma"


@dataclass(frozen=True)
class ImpairmentRule:
    rule_id: str
    target_pos: Pos | None  # None matches any part of speech
    match: MatchKind
    pattern: str

    def __post_init__(self):
        if not self.pattern:
            raise ValueError(f"rule {self.rule_id}: empty pattern")

    def matches(self, token: TaggedToken) -> bool:
        if self.target_pos is not None and token.pos is not self.target_pos:
            return False
        if self.match is MatchKind.EXACT_WORD:
            return token.surface.lower() == self.pattern
        if self.match is MatchKind.LEMMA:
            return token.lemma == self.pattern
        if self.match is MatchKind.PREFIX:
            return len(token.lemma) > len(self.pattern) and token.lemma.startswith(self.pattern)
        return len(token.lemma) > len(self.pattern) and token.lemma.endswith(self.pattern)


@dataclass(frozen=True)
class RuleSet:
    name: str
    rules: tuple[ImpairmentRule, ...]

    def __post_init__(self):
        ids = [r.rule_id for r in self.rules]
        if len(ids) != len(set(ids)):
            raise ValueError(f"rule set {self.name}: duplicate rule ids")

    def rule_ids(self) -> set[str]:
        return {r.rule_id for r in self.rules}


# ---------------------------------------------------------------------------
# Lemmatization

def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1].isalpha():
        return stem[:-1]
    return stem


@lru_cache(maxsize=1)
def _vocab() -> frozenset[str]:
    lex = default_lexicon()
    return frozenset(
        lex.verbs | lex.adjectives | lex.adverbs
        | COMMON_VERBS | COMMON_ADJECTIVES | COMMON_NOUNS
        | frozenset(IRREGULAR_VERBS.values())
    )


@lru_cache(maxsize=65536)
def lemmatize(word: str) -> str:
    """Lowercased lemma: irregular table, then vocabulary-checked suffix
    stripping for -s/-es/-ies/-ed/-ing/-ation(s), else surface heuristics."""
    w = word.lower()
    if w in IRREGULAR_VERBS:
        return IRREGULAR_VERBS[w]
    vocab = _vocab()
    if w in vocab or len(w) <= 3:
        return w

    attempts: list[str] = []
    if w.endswith("ies") or w.endswith("ied"):
        attempts.append(w[:-3] + "y")
    for suf in ("ations", "ation"):
        if w.endswith(suf) and len(w) - len(suf) >= 3:
            stem = w[: -len(suf)]
            attempts += [stem, _undouble(stem), stem + "e"]
    for suf in ("ing", "ed"):
        if w.endswith(suf) and len(w) - len(suf) >= 2:
            stem = w[: -len(suf)]
            attempts += [stem, _undouble(stem), stem + "e"]
    for suf in ("es", "s"):
        if w.endswith(suf) and len(w) - len(suf) >= 2:
            stem = w[: -len(suf)]
            attempts.append(stem)
            if suf == "es":
                attempts.append(stem + "e")
    for cand in attempts:
        if cand in vocab:
            return cand

    # No vocabulary evidence: deterministic surface rules.
    if w.endswith("ies") or w.endswith("ied"):
        return w[:-3] + "y"
    for suf in ("ations", "ation"):
        if w.endswith(suf) and len(w) - len(suf) >= 3:
            return w[: -len(suf)] + "ate"
    for suf in ("ing", "ed"):
        if w.endswith(suf) and len(w) - len(suf) >= 2:
            stem = w[: -len(suf)]
            if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
                stem = stem[:-1]
            return stem
    if w.endswith("es") and len(w) > 4 and (w[-4:-2] in ("ch", "sh") or w[-3] in "sxz"):
        return w[:-2]
    if w.endswith("s") and not w.endswith("ss") and len(w) > 3:
        return w[:-1]
    return w


# ---------------------------------------------------------------------------
# POS tagging

_LY_NOUN_EXCEPTIONS = frozenset({"family", "italy", "july", "assembly", "supply", "rally"})


@lru_cache(maxsize=1)
def _tag_tables() -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    lex = default_lexicon()
    verbs = frozenset(lex.verbs | COMMON_VERBS | frozenset(IRREGULAR_VERBS.values()))
    adjectives = frozenset(lex.adjectives | COMMON_ADJECTIVES)
    adverbs = frozenset(lex.adverbs)
    return verbs, adjectives, adverbs


def _tag_one(lower: str, lemma: str) -> Pos:
    verbs, adjectives, adverbs = _tag_tables()
    if lower in FUNCTION_WORDS:
        return Pos.OTHER
    if lower in adjectives or lemma in adjectives:
        return Pos.ADJECTIVE
    if lemma in verbs:
        return Pos.VERB
    if lower in adverbs or (
        lower.endswith("ly") and len(lower) > 4 and lower not in _LY_NOUN_EXCEPTIONS
    ):
        return Pos.ADVERB
    if lemma != lower and (lower.endswith("ed") or lower.endswith("ing")):
        return Pos.VERB
    if lower.endswith(("less", "ous", "ful", "ish", "ive")):
        return Pos.ADJECTIVE
    return Pos.NOUN


def pos_tag(stmt_text: str) -> list[TaggedToken]:
    """Tag every token with a lemma and a coarse part of speech."""
    out = []
    for token in tokenize(stmt_text):
        lower = token.lower()
        lemma = lemmatize(lower)
        out.append(TaggedToken(surface=token, lemma=lemma, pos=_tag_one(lower, lemma)))
    return out


# ---------------------------------------------------------------------------
# Rule files and the two canonical sets

class MalformedRule(ValueError):
    pass


_POS_NAMES = {p.value: p for p in Pos}


def parse_rules(text: str, name: str) -> RuleSet:
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise MalformedRule(f"{name} line {lineno}: expected 4 tab-separated fields")
        rule_id, pos_name, kind_name, pattern = (p.strip() for p in parts)
        if pos_name == "any":
            pos = None
        elif pos_name in _POS_NAMES:
            pos = _POS_NAMES[pos_name]
        else:
            raise MalformedRule(f"{name} line {lineno}: unknown pos {pos_name!r}")
        try:
            kind = MatchKind(kind_name)
        except ValueError:
            raise MalformedRule(f"{name} line {lineno}: unknown match kind {kind_name!r}") from None
        if not pattern:
            raise MalformedRule(f"{name} line {lineno}: empty pattern")
        if kind in (MatchKind.EXACT_WORD, MatchKind.LEMMA) and pattern != pattern.lower():
            raise MalformedRule(f"{name} line {lineno}: pattern must be lowercase")
        rules.append(ImpairmentRule(rule_id, pos, kind, pattern))
    return RuleSet(name=name, rules=tuple(rules))


def load_rules(path: str | Path) -> RuleSet:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), name=path.stem)


def _packaged_ruleset(filename: str, name: str) -> RuleSet:
    text = resources.files("geomove.data").joinpath(filename).read_text("utf-8")
    return parse_rules(text, name=name)


@lru_cache(maxsize=1)
def baseline_ruleset() -> RuleSet:
    """Negation cues as-is: exact words, de/mis/dis verb prefixes, a/dis
    adjective prefixes, the -less adjective suffix."""
    return _packaged_ruleset("baseline.rules", "baseline")


@lru_cache(maxsize=1)
def modified_ruleset() -> RuleSet:
    """Baseline minus the verb/adjective prefix rules, plus the
    cancel/postpone/prevent/avoid lemma rules."""
    return _packaged_ruleset("modified.rules", "modified")


def apply_ruleset(tokens: Sequence[TaggedToken], rs: RuleSet) -> tuple[Label, list[str]]:
    """Impaired iff at least one rule matches any token.

    Returns the label and the sorted ids of every rule that fired, for
    explainability.  Both are independent of rule ordering.
    """
    fired = sorted({r.rule_id for r in rs.rules if any(r.matches(t) for t in tokens)})
    return (Label.IMPAIRED if fired else Label.NORMAL), fired


def label_statement(text: str, rs: RuleSet) -> Label:
    return apply_ruleset(pos_tag(text), rs)[0]


# ---------------------------------------------------------------------------
# Evaluation

class LengthMismatch(ValueError):
    pass


class EmptyMatrix(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion matrix counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def evaluate(pred: Sequence[Label], gold: Sequence[Label]) -> ConfusionMatrix:
    """Count tp/fp/fn/tn with Impaired as the positive class."""
    if len(pred) != len(gold):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(gold)} gold labels")
    tp = fp = fn = tn = 0
    for p, g in zip(pred, gold):
        if p is Label.IMPAIRED and g is Label.IMPAIRED:
            tp += 1
        elif p is Label.IMPAIRED:
            fp += 1
        elif g is Label.IMPAIRED:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def metrics(cm: ConfusionMatrix) -> tuple[float, float, float, float]:
    """(precision, recall, f1, accuracy); zero-denominator cases yield 0."""
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix is empty")
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (cm.tp + cm.tn) / cm.total
    return precision, recall, f1, accuracy
