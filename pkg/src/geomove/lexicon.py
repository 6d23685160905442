"""Word lists: the movement lexicon file plus tagging vocabularies.

The movement lexicon ships as a data file (sections [verbs], [adjectives],
[adverbs], one lemma per line) and backs the default movement scorer.  The
remaining tables here seed the deterministic POS tagger and lemmatizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class MovementLexicon:
    verbs: frozenset[str]
    adjectives: frozenset[str]
    adverbs: frozenset[str]


_SECTIONS = ("verbs", "adjectives", "adverbs")


def parse_lexicon(text: str) -> MovementLexicon:
    sections: dict[str, set[str]] = {name: set() for name in _SECTIONS}
    current: str | None = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in sections:
                raise ValueError(f"line {lineno}: unknown lexicon section {name!r}")
            current = name
            continue
        if current is None:
            raise ValueError(f"line {lineno}: lemma before any section header")
        sections[current].add(line.lower())
    return MovementLexicon(
        verbs=frozenset(sections["verbs"]),
        adjectives=frozenset(sections["adjectives"]),
        adverbs=frozenset(sections["adverbs"]),
    )


def load_lexicon(path: str | Path) -> MovementLexicon:
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_lexicon() -> MovementLexicon:
    text = resources.files("geomove.data").joinpath("movement_lexicon.txt").read_text("utf-8")
    return parse_lexicon(text)


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    text = resources.files("geomove.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(
        w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#")
    )


# ---------------------------------------------------------------------------
# Closed-class words.  Tagged Other regardless of anything else.

FUNCTION_WORDS = frozenset("""
a an the and or but nor so yet if then than because while although though as
of at by in on for with about against between among into onto through toward
towards over under above below across along around behind beyond during near
past per since until till upon via within without to from off out up down
not no never none nobody nothing nowhere n't cannot
is are am was were be been being do does did done have has had having
will would shall should can could may might must ought
i you he she it we they me him her us them my your his its our their
mine yours hers ours theirs myself yourself himself herself itself ourselves
themselves this that these those there here who whom whose which what when
where why how all any both each few many much more most less least other some
such only own same too very just again further once also now ever yes
""".split())


# ---------------------------------------------------------------------------
# Verb vocabulary used for lemma validation and Verb tagging.  Movement verbs
# from the packaged lexicon are unioned in at tagger-build time.

COMMON_VERBS = frozenset("""
add allow announce appear arrive ask avoid ban begin believe block board
break bring build buy call cancel carry catch change choose close collect
come confirm connect consider contain continue cost count cover create cut
decide declare delay deliver demand deny depart depend describe design
destroy detect determine develop die disappear discover discuss dismiss
display disrupt distribute divert drink drive eat evacuate expect export
fall feel fight find follow forget freeze get give grind ground grow halt
happen hear help hold import include keep kill know land lead learn leave
let like live look lose love make mean meet migrate misjudge mislead
misplace miss need offer open operate pay plan play postpone prevent provide
quarantine reach read remain remember reopen report restrict resume ride
ring rise say schedule seal see seek seem sell send serve set shake ship
show shut sing sit sleep smuggle speak spend stand start state stay steal
stick stop strand suggest suspend take talk teach tear tell think throw
trace track trade transport try turn understand use visit wait want watch
wear win work write
""".split())


COMMON_ADJECTIVES = frozenset("""
able active additional afraid alone annual anxious asleep available average
bad big busy careless clean clear closed cold common crowded dangerous
difficult direct dirty distant distinct early empty endless free full global
good happy harmless healthy heavy high hot huge important impossible
international late light local long low major minor motionless national new
normal old open popular possible private public quiet rare ready recent
restless sad safe serious several sharp short sick similar simple small
special strange strong substantial successful sudden tiny tired useless
warm weak young
""".split())


COMMON_NOUNS = frozenset("""
airplane airport area article border bus car cargo case city country crew
day disease event family fan flight game goods government home lockdown
match migrant month movement news officer official passenger people person
place plane player police port report restriction road route school ship
smuggler state statement station story team time tourist town train
traveler trip truck virus week world year
""".split())


# Inflected form -> lemma.  Covers the irregular movement verbs plus the
# frequent English irregulars the tagger is likely to meet.
IRREGULAR_VERBS: dict[str, str] = {
    "went": "go", "gone": "go",
    "ran": "run",
    "flew": "fly", "flown": "fly",
    "fled": "flee",
    "crept": "creep",
    "leapt": "leap",
    "swept": "sweep",
    "slid": "slide",
    "slunk": "slink", "slank": "slink",
    "sped": "speed",
    "strode": "stride", "stridden": "stride",
    "trod": "tread", "trodden": "tread",
    "dove": "dive",
    "left": "leave",
    "stuck": "stick",
    "sat": "sit",
    "stood": "stand",
    "came": "come",
    "saw": "see", "seen": "see",
    "said": "say",
    "took": "take", "taken": "take",
    "made": "make",
    "got": "get", "gotten": "get",
    "brought": "bring",
    "bought": "buy",
    "caught": "catch",
    "taught": "teach",
    "thought": "think",
    "felt": "feel",
    "kept": "keep",
    "slept": "sleep",
    "met": "meet",
    "found": "find",
    "held": "hold",
    "heard": "hear",
    "told": "tell",
    "sold": "sell",
    "paid": "pay",
    "sent": "send",
    "spent": "spend",
    "built": "build",
    "lost": "lose",
    "won": "win",
    "knew": "know", "known": "know",
    "grew": "grow", "grown": "grow",
    "threw": "throw", "thrown": "throw",
    "drew": "draw", "drawn": "draw",
    "drove": "drive", "driven": "drive",
    "rode": "ride", "ridden": "ride",
    "rose": "rise", "risen": "rise",
    "fell": "fall", "fallen": "fall",
    "gave": "give", "given": "give",
    "wrote": "write", "written": "write",
    "ate": "eat", "eaten": "eat",
    "began": "begin", "begun": "begin",
    "swam": "swim", "swum": "swim",
    "sang": "sing", "sung": "sing",
    "rang": "ring", "rung": "ring",
    "drank": "drink", "drunk": "drink",
    "shook": "shake", "shaken": "shake",
    "broke": "break", "broken": "break",
    "chose": "choose", "chosen": "choose",
    "froze": "freeze", "frozen": "freeze",
    "spoke": "speak", "spoken": "speak",
    "stole": "steal", "stolen": "steal",
    "wore": "wear", "worn": "wear",
    "tore": "tear", "torn": "tear",
    "bore": "bear", "borne": "bear",
    "did": "do", "done": "do",
    "was": "be", "were": "be", "been": "be", "is": "be", "are": "be", "am": "be",
    "has": "have", "had": "have",
    "meant": "mean",
    "led": "lead",
    "sought": "seek",
    "fought": "fight",
    "forgot": "forget", "forgotten": "forget",
    "understood": "understand",
    "ground": "grind",
}
