"""Command-line interface.

Subcommands: ingest (parse -> clean -> segment -> score -> geoparse ->
label -> index), serve, eval-impairment, eval-geoparser, breaks, query,
and report (delimited output plus rendered figures).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import report as report_mod
from .analytics import TemporalBucket, aggregate_connections, top_bigrams
from .api_service import Service, ServiceConfig, load_config, resolve_config_path, serve_forever
from .class_breaks import compute_breaks
from .corpus_model import Source
from .geoparser import evaluate_geoparser, load_gazetteer, load_gold
from .impairment_rules import (
    Label,
    apply_ruleset,
    evaluate,
    load_rules,
    metrics,
    modified_ruleset,
    pos_tag,
)
from .ingest import ingest_files
from .movement_scorer import MovementScorerConfig
from .search_index import IndexNotReady, SearchIndex


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomove",
        description="Mine, geo-locate, classify and explore statements about geographic movement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="process record files into the index")
    p.add_argument("files", nargs="+")
    p.add_argument("--source", choices=[s.value for s in Source], default=None,
                   help="source for records without a source field")
    p.add_argument("--gazetteer", required=True)
    p.add_argument("--index-dir", required=True)
    p.add_argument("--rules", default=None, help="impairment rules file (default: modified set)")
    p.add_argument("--lexicon", default=None, help="movement lexicon file (default: packaged)")
    p.add_argument("--threshold", type=float, default=0.6)
    p.add_argument("--lenient", action="store_true",
                   help="fall back to --default-date on malformed timestamps")
    p.add_argument("--default-date", default=None)

    p = sub.add_parser("serve", help="serve the HTTP API over a committed index")
    p.add_argument("--config", default=None)
    p.add_argument("--rebuild", action="store_true",
                   help="re-derive token caches from the statement store")

    p = sub.add_parser("eval-impairment", help="score a rule set against labeled statements")
    p.add_argument("--rules", required=True)
    p.add_argument("--gold", required=True, help="JSONL of {text, label}")

    p = sub.add_parser("eval-geoparser", help="score recognition and resolution against gold spans")
    p.add_argument("--gold", required=True)
    p.add_argument("--gazetteer", required=True)

    p = sub.add_parser("breaks", help="compute class breaks for a value list")
    p.add_argument("--method", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--values", required=True, help="comma-separated numbers")

    p = sub.add_parser("query", help="ad-hoc search, table output")
    _add_query_args(p)
    p.add_argument("--page", type=int, default=0)
    p.add_argument("--page-size", type=int, default=20)

    p = sub.add_parser("report", help="write CSV aggregates and rendered figures")
    _add_query_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--boundaries", default=None)
    p.add_argument("--method", default="equal_interval")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--limit", type=int, default=10)

    return parser


def _add_query_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--index-dir", required=True)
    p.add_argument("--q", default=None)
    p.add_argument("--sources", default=None, help="comma-separated subset of news,microblog,scientific")
    p.add_argument("--movement", default=None, help="comma-separated subset of normal,impaired")
    p.add_argument("--from", dest="time_from", default=None)
    p.add_argument("--to", dest="time_to", default=None)
    p.add_argument("--scale", default=None)
    p.add_argument("--bins", default=None, help="comma-separated bin ids (needs --scale)")


def _query_params(args: argparse.Namespace) -> dict[str, str]:
    params: dict[str, str] = {}
    if args.q:
        params["q"] = args.q
    if args.sources:
        params["sources"] = args.sources
    if args.movement:
        params["movement"] = args.movement
    if args.time_from:
        params["from"] = args.time_from
    if args.time_to:
        params["to"] = args.time_to
    if args.scale:
        params["scale"] = args.scale
    if args.bins:
        params["bins"] = args.bins
    return params


def _service_for(index_dir: str, boundaries: str | None = None) -> Service:
    config = ServiceConfig(index_dir=index_dir, boundaries=boundaries)
    service = Service(config)
    if not service.ready:
        raise IndexNotReady(f"no committed index at {index_dir}")
    return service


# ---------------------------------------------------------------------------
# Subcommands

def cmd_ingest(args: argparse.Namespace) -> int:
    gaz = load_gazetteer(args.gazetteer)
    cfg = MovementScorerConfig(threshold=args.threshold, lexicon_path=args.lexicon)
    rules = load_rules(args.rules) if args.rules else modified_ruleset()
    source = Source.parse(args.source) if args.source else None
    default_date = None
    if args.default_date:
        default_date = datetime.fromisoformat(args.default_date).replace(tzinfo=timezone.utc)

    index = SearchIndex()
    stats = ingest_files(
        args.files, index, gaz, cfg, rules,
        source=source, lenient=args.lenient, default_date=default_date,
    )
    index.save(args.index_dir)
    for line in stats.lines():
        print(line)
    print(f"index committed        {len(index)} statements -> {args.index_dir}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    config = load_config(resolve_config_path(args.config))
    index = SearchIndex.load(config.index_dir, rebuild=args.rebuild)
    service = Service(config, index=index)
    print(f"serving {len(index)} statements on http://{config.listen}")
    serve_forever(service)
    return 0


def cmd_eval_impairment(args: argparse.Namespace) -> int:
    rules = load_rules(args.rules)
    pred, gold = [], []
    for line in Path(args.gold).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        gold.append(Label.parse(record["label"]))
        pred.append(apply_ruleset(pos_tag(record["text"]), rules)[0])
    cm = evaluate(pred, gold)
    precision, recall, f1, accuracy = metrics(cm)
    print(f"tp {cm.tp}  fp {cm.fp}  fn {cm.fn}  tn {cm.tn}")
    print(f"precision {precision:.2f}")
    print(f"recall    {recall:.2f}")
    print(f"f1        {f1:.2f}")
    print(f"accuracy  {accuracy:.2f}")
    return 0


def cmd_eval_geoparser(args: argparse.Namespace) -> int:
    gaz = load_gazetteer(args.gazetteer)
    scores = evaluate_geoparser(load_gold(args.gold), gaz)
    print(f"recognition precision {scores.precision:.2f}")
    print(f"recognition recall    {scores.recall:.2f}")
    print(f"recognition f1        {scores.f1:.2f}")
    print(f"resolution accuracy   {scores.resolution_accuracy:.2f}")
    return 0


def cmd_breaks(args: argparse.Namespace) -> int:
    values = [float(v) for v in args.values.split(",") if v.strip()]
    breaks = compute_breaks(values, args.method, args.k)
    print(",".join(f"{b:g}" for b in breaks.bounds))
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    service = _service_for(args.index_dir)
    params = _query_params(args)
    params["page"] = str(args.page)
    params["page_size"] = str(args.page_size)
    status, body = service.handle("/statements", params)
    if status != 200:
        print(f"error {status}: {body.get('error')}", file=sys.stderr)
        return 1
    print(f"total {body['total']}  page {body['page']}")
    for stmt in body["statements"]:
        text = stmt["text"] if len(stmt["text"]) <= 78 else stmt["text"][:75] + "..."
        label = stmt["impaired"] or "-"
        print(f"{stmt['published_at'][:10]}  {stmt['source']:<10}  {label:<8}  {text}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    service = _service_for(args.index_dir, boundaries=args.boundaries)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = _query_params(args)
    params["method"] = args.method
    params["k"] = str(args.k)

    status, bins_body = service.handle("/bins", params)
    if status != 200:
        print(f"error {status}: {bins_body.get('error')}", file=sys.stderr)
        return 1
    status, timeline_body = service.handle("/timeline", params)
    if status != 200:
        print(f"error {status}: {timeline_body.get('error')}", file=sys.stderr)
        return 1

    buckets = [
        TemporalBucket(b["month"], b["normal"], b["impaired"])
        for b in timeline_body["buckets"]
    ]
    written = [
        report_mod.write_bins_csv(bins_body["bins"], out / "bins.csv"),
        report_mod.write_timeline_csv(buckets, out / "timeline.csv"),
        report_mod.render_timeline(buckets, out / "timeline.png"),
    ]
    breaks = bins_body.get("breaks") or {"k": args.k, "bounds": []}
    written.append(
        report_mod.render_bin_map(
            bins_body["bins"], breaks["k"], breaks["bounds"], out / "map.png"
        )
    )

    stmts = service.index.statements_for_mask(
        service.index.full_match(service._parse_query(params))
    )
    params["limit"] = str(args.limit)
    status, bigram_body = service.handle("/bigrams", params)
    if status == 200:
        from .analytics import BigramCount

        ranked = [
            BigramCount((b["tokens"][0], b["tokens"][1]), b["count"])
            for b in bigram_body["bigrams"]
        ]
        written.append(report_mod.write_bigrams_csv(ranked, out / "bigrams.csv"))
    if args.bins and args.scale:
        scale = service._scale_for(args.scale)
        pairs = aggregate_connections(stmts, scale, set(args.bins.split(",")))
        written.append(report_mod.write_connections_csv(pairs, out / "connections.csv"))

    for path in written:
        print(path)
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "serve": cmd_serve,
    "eval-impairment": cmd_eval_impairment,
    "eval-geoparser": cmd_eval_geoparser,
    "breaks": cmd_breaks,
    "query": cmd_query,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - diagnostic then non-zero exit
        print(f"geomove {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
