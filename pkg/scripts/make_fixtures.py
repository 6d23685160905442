#!/usr/bin/env python3
"""Regenerate the frozen test fixtures under tests/data/.

Each fixture is verified against the library before being written, so the
files stay consistent with the shipped rule sets, scorer and gazetteer.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

sys.path.insert(0, str(ROOT / "src"))

from geomove.corpus_model import Label, Source  # noqa: E402
from geomove.geoparser import load_gazetteer, geoparse_statement  # noqa: E402
from geomove.impairment_rules import (  # noqa: E402
    apply_ruleset,
    baseline_ruleset,
    evaluate,
    metrics,
    modified_ruleset,
    pos_tag,
)
from geomove.movement_scorer import score_movement  # noqa: E402

IMPAIRED = "impaired"
NORMAL = "normal"


# ---------------------------------------------------------------------------
# Impairment gold sample: 100 statements built so the baseline rules produce
# exactly tp=23 fp=27 fn=8 tn=42 and the modified rules beat them on F1.

TRUE_POSITIVES = [
    "No flights left the airport after the storm.",
    "The border crossing is not open to travelers.",
    "Trains never reached the coastal towns this week.",
    "None of the buses ran during the strike.",
    "Nobody could travel to the island after the ferry broke down.",
    "Nothing moved through the port for three days.",
    "Tourists are going nowhere while the airport stays shut.",
    "Residents can't leave the city during the curfew.",
    "Trucks cannot cross the bridge after the flood.",
    "The team returned home without playing the away match.",
    "There is no way to reach the village by road now.",
    "Flights to the capital are not running this month.",
    "The night train never left the station.",
    "Shipments could not move past the checkpoint.",
    "We didn't make it to the border before it closed.",
    "No ferries sailed to the islands over the weekend.",
    "The airline is not flying its usual routes.",
    "Guests cannot drive up the mountain road this season.",
    "None of the cargo moved out of the harbor.",
    "Buses aren't crossing the old bridge anymore.",
    "The expedition never started its trek north.",
    "The stranded hikers found no path down the valley.",
    "Migrants could not board the overcrowded boats.",
]

FALSE_POSITIVES = [
    "The train departed on time for the coast.",
    "Couriers delivered packages across the city.",
    "The ferry descended the river toward the delta.",
    "Officials described the new railway route.",
    "Planners designed a faster bus corridor.",
    "The mayor discussed the metro expansion plans.",
    "Crowds dispersed quickly after the parade.",
    "The airline displayed its summer schedule.",
    "Engineers detected cracks along the tramway.",
    "The company distributed tickets at the station.",
    "Commuters depend on the early morning express.",
    "The guide demonstrated the border crossing procedure.",
    "Surveyors determined the best path through the hills.",
    "The crew misplaced a container at the dock.",
    "A tourist misjudged the ferry timetable.",
    "Drivers dismissed concerns about the detour.",
    "Officials disclosed the new flight paths.",
    "The city developed new cycling routes.",
    "Extra buses are available along the harbor route.",
    "The average journey took two hours.",
    "The annual parade moved through downtown.",
    "Additional trains ran on the holiday weekend.",
    "Anxious travelers arrived early at the gate.",
    "The able crew rowed across the strait.",
    "Distant villages welcomed the hiking groups.",
    "The distinct mountain trail drew many walkers.",
    "Distant relatives drove in from the countryside.",
]

FALSE_NEGATIVES_RECOVERABLE = [
    "The airline canceled all weekend flights.",
    "Organizers postponed the championship match.",
    "Heavy snow prevented trucks from reaching the pass.",
    "Most tourists avoided the flooded coastal road.",
    "Storm warnings forced the port to cancel departures.",
    "The ministry postponed reopening the land border.",
]

FALSE_NEGATIVES_MISSED = [
    "The fruit shipment was stuck in the warehouse for weeks.",
    "All ferries remained grounded during the gale.",
]

TRUE_NEGATIVES_MODIFIED_FP = [
    "He avoided the highway traffic by taking the train.",
    "Street police prevented crowding as the parade passed through.",
]

TRUE_NEGATIVES = [
    "The ship sailed from the harbor at dawn.",
    "Families walked along the river path.",
    "The express train reached the city early.",
    "Hikers climbed the northern ridge before noon.",
    "Cargo ships crossed the strait overnight.",
    "The caravan moved steadily across the plains.",
    "Cyclists raced through the old town.",
    "The ferry carried workers to the island.",
    "Nomads wander the high plateau each summer.",
    "The convoy rolled past the second checkpoint.",
    "Pilgrims journey to the shrine every spring.",
    "The tram glides between the two stations.",
    "Traders traveled the mountain pass for centuries.",
    "Children skipped along the schoolyard fence.",
    "The bus looped around the stadium twice.",
    "Geese flew south ahead of the cold front.",
    "The patrol marched back to the barracks.",
    "Fishing boats returned with the evening tide.",
    "The shuttle runs hourly from the terminal.",
    "Porters hauled supplies up the steep trail.",
    "The herd migrated toward greener pastures.",
    "Commuters streamed out of the subway.",
    "The riders trotted along the beach at low tide.",
    "Sled dogs pulled the team over the frozen lake.",
    "The liner sailed onward to the southern port.",
    "Scouts trekked deep into the forest.",
    "The parade wound through the market square.",
    "Refugees crossed the river at first light.",
    "The postman cycles past the farm each morning.",
    "Season workers head north for the harvest.",
    "The tour group strolled across the plaza.",
    "Lava flowed slowly toward the sea.",
    "The climbers advanced to the second camp.",
    "Her taxi sped through the empty streets.",
    "The band toured five cities in ten days.",
    "Whales swim along this coast in winter.",
    "The courier pedaled uphill against the wind.",
    "Troops moved forward under clear skies.",
    "The gondola drifted beneath the stone bridge.",
    "Travelers poured into the station at rush hour.",
]


def build_impairment_gold() -> list[dict]:
    rows = []
    rows += [{"text": t, "label": IMPAIRED} for t in TRUE_POSITIVES]
    rows += [{"text": t, "label": NORMAL} for t in FALSE_POSITIVES]
    rows += [{"text": t, "label": IMPAIRED} for t in FALSE_NEGATIVES_RECOVERABLE]
    rows += [{"text": t, "label": IMPAIRED} for t in FALSE_NEGATIVES_MISSED]
    rows += [{"text": t, "label": NORMAL} for t in TRUE_NEGATIVES_MODIFIED_FP]
    rows += [{"text": t, "label": NORMAL} for t in TRUE_NEGATIVES]
    assert len(rows) == 100, len(rows)
    return rows


def verify_impairment_gold(rows: list[dict]) -> None:
    gold = [Label.parse(r["label"]) for r in rows]
    for name, rs, expected in (
        ("baseline", baseline_ruleset(), (23, 27, 8, 42)),
        ("modified", modified_ruleset(), (29, 2, 2, 67)),
    ):
        pred = [apply_ruleset(pos_tag(r["text"]), rs)[0] for r in rows]
        cm = evaluate(pred, gold)
        got = (cm.tp, cm.fp, cm.fn, cm.tn)
        if got != expected:
            for r, p, g in zip(rows, pred, gold):
                flag = ""
                if p is Label.IMPAIRED and g is not Label.IMPAIRED:
                    flag = "FP"
                elif p is not Label.IMPAIRED and g is Label.IMPAIRED:
                    flag = "FN"
                if flag:
                    fired = apply_ruleset(pos_tag(r["text"]), rs)[1]
                    print(f"  {name} {flag}: {r['text']}  fired={fired}")
            raise SystemExit(f"{name} confusion {got} != expected {expected}")
        p, r_, f1, acc = metrics(cm)
        print(f"{name}: tp={cm.tp} fp={cm.fp} fn={cm.fn} tn={cm.tn} "
              f"P={p:.2f} R={r_:.2f} F1={f1:.2f} Acc={acc:.2f}")


# ---------------------------------------------------------------------------
# Geoparser gold micro-corpus

GEO_GOLD = [
    # (source, text, [(surface, place_id), ...]) - surfaces resolved to offsets
    ("news", "Flights from New York to London resumed on Monday.",
     [("New York", 17), ("London", 13)]),
    ("microblog", "stuck at JFK no flights out", [("JFK", 18)]),
    ("microblog", "new york to paris flights grounded again",
     [("new york", 17), ("paris", 14)]),  # paris: designed resolution miss (context pulls to TX)
    ("news", "Paris welcomed millions of visitors this spring.", [("Paris", 14)]),
    ("news", "The bus from Dallas arrived in Paris after sunset.",
     [("Dallas", 16), ("Paris", 15)]),
    ("news", "Smugglers moved gold from Mumbai to Chennai by train.",
     [("Mumbai", 4), ("Chennai", 5)]),
    ("scientific", "Travel between Tokyo and Sydney fell during the pandemic.",
     [("Tokyo", 20), ("Sydney", 19)]),
    ("news", "The expedition sailed from Lisbon to Boston in May.",
     [("Lisbon", 24), ("Boston", 25)]),
    ("microblog", "karachi to sindh highway closed", [("karachi", 9), ("sindh", 8)]),
    ("news", "New York City tour buses returned to full schedules.",
     [("New York City", 18)]),
    ("news", "Officials in Tamil Nadu traced shipments to Maharashtra.",
     [("Tamil Nadu", 3), ("Maharashtra", 2)]),
    ("news", "Protesters marched through Georgia toward Tbilisi.",
     [("Georgia", 29), ("Tbilisi", 36)]),  # georgia: designed resolution miss (population pulls to US)
    ("news", "Mobile networks failed as storms crossed the coast.", []),  # designed FP
    ("microblog", "nice day for a walk along the thames", []),  # designed FP (case-insensitive source)
    ("news", "Trucks rolled from Victoria toward the northern mines.", [("Victoria", 31)]),
    ("microblog", "ferries from vancouver to victoria suspended",
     [("vancouver", 41), ("victoria", 32)]),
    ("news", "Azadpur market traders drove produce toward Delhi overnight.",
     [("Azadpur", 999), ("Delhi", 6)]),  # Azadpur: designed recognition miss
    ("news", "The caravan crossed from Pakistan into India near the desert.",
     [("Pakistan", 7), ("India", 1)]),
    ("scientific", "Shipments moved from Singapore to Colombo weekly.",
     [("Singapore", 26), ("Colombo", 42)]),
    ("news", "Storms shut the road between Madrid and Milan.",
     [("Madrid", 33), ("Milan", 34)]),
    ("microblog", "flights from england to france still running",
     [("england", 12), ("france", 39)]),
    ("news", "Herds migrated across Bangladesh toward the delta.", [("Bangladesh", 10)]),
]


def build_geo_gold() -> list[dict]:
    rows = []
    for source, text, spans in GEO_GOLD:
        annotations = []
        for surface, place_id in spans:
            start = text.find(surface)
            assert start >= 0, (text, surface)
            assert text.find(surface, start + 1) == -1, f"ambiguous surface {surface!r}"
            annotations.append({"start": start, "end": start + len(surface), "place_id": place_id})
        rows.append({"text": text, "source": source, "annotations": annotations})
    return rows


def verify_geo_gold(rows: list[dict]) -> None:
    from geomove.geoparser import GoldStatement, evaluate_geoparser

    gaz = load_gazetteer(DATA / "gazetteer.tsv")
    gold = [
        GoldStatement(
            text=r["text"],
            source=Source.parse(r["source"]),
            annotations=[(a["start"], a["end"], a["place_id"]) for a in r["annotations"]],
        )
        for r in rows
    ]
    scores = evaluate_geoparser(gold, gaz)
    print(f"geoparser gold: P={scores.precision:.3f} R={scores.recall:.3f} "
          f"F1={scores.f1:.3f} acc={scores.resolution_accuracy:.3f}")
    assert scores.f1 >= 0.90, scores
    assert scores.resolution_accuracy >= 0.90, scores


# ---------------------------------------------------------------------------
# End-to-end corpus (gold smuggling scenario plus filler)

E2E_DOCS = [
    # (doc_id, source, date, text, expected_label, expected_place_ids)
    ("n1", "news", "2019-10-03",
     "Police traced the gold smuggling route running from Mumbai to Chennai.",
     NORMAL, [4, 5]),
    ("n2", "news", "2019-10-07",
     "Customs officers said gold smuggling gangs travel from Mumbai to Chennai by train.",
     NORMAL, [4, 5]),
    ("n3", "news", "2019-10-18",
     "The gold smuggling suspects could not travel from Chennai to Mumbai after police raids.",
     IMPAIRED, [5, 4]),
    ("n4", "news", "2019-10-25",
     "A flight traveling from Chennai to Singapore with smuggled gold was canceled.",
     IMPAIRED, [5, 26]),
    ("n5", "news", "2019-11-02",
     "Gold smuggling arrests fell as traders journey from Mumbai to Delhi.",
     NORMAL, [4, 6]),
    ("n6", "news", "2019-10-09",
     "Thousands marched through London without any violence.",
     IMPAIRED, [13]),
    ("n7", "news", "2019-10-24",
     "Police said smugglers moved the migrants through England in a sealed truck.",
     NORMAL, [12]),
    ("n8", "news", "2020-04-01",
     "Airlines canceled flights from London to New York as travel demand collapsed.",
     IMPAIRED, [13, 17]),
    ("n9", "news", "2019-12-05",
     "Cargo ships journey from Karachi to Mumbai across the sea.",
     NORMAL, [9, 4]),
    ("n10", "news", "2019-10-30",
     "Investigators said gold moved from Sindh to Tamil Nadu through coastal routes.",
     NORMAL, [8, 3]),
    ("t1", "microblog", "2019-10-12",
     "gold smuggling crew moving from mumbai to chennai again",
     NORMAL, [4, 5]),
    ("t2", "microblog", "2019-09-28",
     "the gold smuggling story keeps moving from city to city",
     NORMAL, []),
    ("t3", "microblog", "2020-02-14",
     "flights to Tokyo canceled no travel for now",
     IMPAIRED, [20]),
    ("t4", "microblog", "2019-10-24",
     "so sad people smuggled in trucks cannot travel to england safely",
     IMPAIRED, [12]),
    ("s1", "scientific", "2019-10-20",
     "The study tracked smuggled goods that travel from Mumbai to Chennai weekly.",
     NORMAL, [4, 5]),
    ("s2", "scientific", "2020-03-15",
     "Travel from Japan to Australia fell sharply during the quarantine.",
     NORMAL, [21, 22]),
]


def verify_e2e() -> None:
    gaz = load_gazetteer(DATA / "gazetteer.tsv")
    rules = modified_ruleset()
    for doc_id, source, date, text, expected_label, expected_places in E2E_DOCS:
        score = score_movement(text)
        assert score > 0.6, (doc_id, score, text)
        label = apply_ruleset(pos_tag(text), rules)[0]
        assert label.value == expected_label, (doc_id, label, text)
        mentions = geoparse_statement(text, gaz, Source.parse(source))
        got = [m.resolved.place_id for m in mentions]
        assert got == expected_places, (doc_id, got, expected_places, text)
    print(f"e2e corpus: {len(E2E_DOCS)} docs verified (score, label, places)")


def write_e2e() -> None:
    by_source: dict[str, list[dict]] = {"news": [], "microblog": [], "scientific": []}
    for doc_id, source, date, text, _label, _places in E2E_DOCS:
        by_source[source].append(
            {
                "id": doc_id,
                "source": source,
                "published_at": date,
                "text": text,
                "url": f"https://example.org/{source}/{doc_id}",
            }
        )
    for source, records in by_source.items():
        path = DATA / f"e2e_{source}.jsonl"
        path.write_text(
            "".join(json.dumps(r, sort_keys=True) + "\n" for r in records), encoding="utf-8"
        )
        print(f"wrote {path} ({len(records)} records)")


# ---------------------------------------------------------------------------
# Small ingest fixture with malformed records, for CLI stage counts

INGEST_MIXED = [
    {"id": "d1", "source": "news", "published_at": "2020-01-05",
     "text": "Trains travel from Paris to Rome daily. The service was canceled without warning.",
     "url": "https://example.org/news/d1"},
    {"id": "d2", "source": "news", "published_at": "2020-01-06",
     "text": "Visit <b>Paris</b> now! Flights go from London to Paris. See https://ex.com"},
    {"id": "d3", "source": "microblog", "published_at": "2020-01-07",
     "text": "RT @user heading to Tokyo https://t.co/x"},
]


def write_ingest_fixture() -> None:
    path = DATA / "ingest_mixed.jsonl"
    lines = [json.dumps(r, sort_keys=True) for r in INGEST_MIXED]
    lines.append("{not json")  # malformed structure
    lines.append(json.dumps({"id": "d5", "source": "news", "published_at": "2020-01-08"}))  # no text
    lines.append(json.dumps({"id": "d6", "source": "news", "published_at": "not-a-date",
                             "text": "Ships sail from Lisbon to Boston."}))  # bad timestamp
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)

    rows = build_impairment_gold()
    verify_impairment_gold(rows)
    (DATA / "impairment_gold.jsonl").write_text(
        "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows), encoding="utf-8"
    )
    print(f"wrote {DATA / 'impairment_gold.jsonl'} ({len(rows)} rows)")

    geo_rows = build_geo_gold()
    verify_geo_gold(geo_rows)
    (DATA / "geoparser_gold.jsonl").write_text(
        "".join(json.dumps(r, sort_keys=True) + "\n" for r in geo_rows), encoding="utf-8"
    )
    print(f"wrote {DATA / 'geoparser_gold.jsonl'} ({len(geo_rows)} rows)")

    verify_e2e()
    write_e2e()
    write_ingest_fixture()


if __name__ == "__main__":
    main()
