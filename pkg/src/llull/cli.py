"""Command-line entry point for every pipeline stage.

Exit codes: 0 success, 2 configuration/usage failure, 1 runtime failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import coverage as coverage_mod
from . import extraction, machine, metrics, registry, rewriting
from .config import build_gateway, load_config
from .errors import ConfigError, LlullError
from .projection import run_projection

log = logging.getLogger(__name__)


def _read_titles(path: str) -> list[str]:
    """Plain text (one per line) or idea JSONL with title/text fields."""
    text = Path(path).read_text(encoding="utf-8")
    titles = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("{"):
            try:
                row = json.loads(line)
                titles.append(row.get("title") or row.get("text") or "")
                continue
            except json.JSONDecodeError:
                pass
        titles.append(line)
    return [t for t in titles if t]


def _load_venue_registries(registry_dir: str, venue: str, year: int) -> dict:
    regs = {}
    for disk in registry.DISKS:
        path = Path(registry_dir) / registry.registry_filename(venue, year, disk)
        if not path.exists():
            raise LlullError(f"missing registry file: {path}")
        regs[disk] = registry.load_registry(path)
    return regs


def _cmd_ingest(args) -> int:
    loaded, rejects = corpus_mod.ingest(args.input, format=args.format)
    corpus_mod.save(loaded, args.out)
    if args.rejects:
        corpus_mod.write_rejects(rejects, args.rejects)
    print(f"ingested {len(loaded)} records, {len(rejects)} rejects -> {args.out}")
    return 0


def _cmd_extract(args) -> int:
    cfg = load_config(args.config)
    gw = build_gateway(cfg, cache_dir=args.cache)
    mode = args.mode or cfg.gateway_mode
    loaded, _ = corpus_mod.ingest(args.corpus)
    drafts, failures = extraction.extract_corpus(loaded, gw, mode)
    extraction.save_drafts(drafts, args.out)
    if args.failures:
        extraction.save_failures(failures, args.failures)
    print(f"extracted {len(drafts)} drafts, {len(failures)} failures -> {args.out}")
    return 0


def _cmd_merge(args) -> int:
    cfg = load_config(args.config)
    gw = None
    mode = args.mode or cfg.gateway_mode
    if not args.no_model:
        gw = build_gateway(cfg, cache_dir=args.cache)
    loaded, _ = corpus_mod.ingest(args.corpus)
    drafts = extraction.load_drafts(args.drafts)
    venue_of = {r.id: (r.venue, r.year) for r in loaded.records}
    grouped: dict[tuple, list] = {}
    for d in drafts:
        key = venue_of.get(d.paper_id)
        if key is None:
            log.warning("draft %s has no corpus record; skipped", d.paper_id)
            continue
        grouped.setdefault(key, []).append(d)

    per_disk: dict[str, list] = {d: [] for d in registry.DISKS}
    for (venue, year) in sorted(grouped):
        batch = grouped[(venue, year)]
        for disk in registry.DISKS:
            reg = registry.build_registry(batch, venue, year, disk, gateway=gw,
                                          mode=mode, chunk_size=cfg.merge_chunk_size)
            registry.save_registry(reg, args.registry_dir)
            per_disk[disk].append(reg)
        treg = registry.build_template_registry(batch, venue, year,
                                                is_valid=machine.is_parseable)
        registry.save_template_registry(treg, args.registry_dir)
    if args.all and per_disk["A"]:
        for disk in registry.DISKS:
            pooled = registry.build_all_registry(per_disk[disk], gateway=gw, mode=mode,
                                                 min_visits=cfg.all_min_visits,
                                                 chunk_size=cfg.merge_chunk_size)
            registry.save_registry(pooled, args.registry_dir)
    print(f"registries for {len(grouped)} venue-years -> {args.registry_dir}")
    return 0


def _cmd_stats(args) -> int:
    disks, templates = registry.load_registry_dir(args.registry_dir)
    paper_counts = None
    if args.corpus:
        loaded, _ = corpus_mod.ingest(args.corpus)
        paper_counts = {}
        for r in loaded.records:
            paper_counts[(r.venue, r.year)] = paper_counts.get((r.venue, r.year), 0) + 1
    rows = registry.registry_stats(disks, templates, paper_counts)
    csv_text = registry.stats_to_csv(rows)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    print(csv_text, end="")
    return 0


def _cmd_generate(args) -> int:
    regs = _load_venue_registries(args.registry_dir, args.venue, args.year)
    template = (machine.basic_template() if args.template == "basic"
                else machine.parse_template(args.template))
    if args.mode == "top":
        ideas = list(machine.enumerate_top(regs, args.k, template))
        sampling = {"mode": "top", "k": args.k}
    else:
        ideas = machine.sample_random(regs, template, args.n, args.seed)
        sampling = {"mode": "random", "n": args.n, "seed": args.seed}
    if args.subsample:
        ideas = machine.subsample(ideas, args.subsample, args.seed)
        sampling["subsample"] = args.subsample
    machine.save_ideas(ideas, args.out, venue=f"{args.venue}-{args.year}", sampling=sampling)
    print(f"{len(ideas)} raw ideas -> {args.out}")
    return 0


def _cmd_rewrite(args) -> int:
    cfg = load_config(args.config)
    gw = build_gateway(cfg, cache_dir=args.cache)
    mode = args.mode or cfg.gateway_mode
    ideas = machine.load_ideas(args.ideas)
    records, failures = rewriting.rewrite_batch(ideas, gw, mode)
    rewriting.save_records(records, args.out)
    if args.titles:
        rewriting.save_titles(records, args.titles)
    if args.failures:
        extraction.save_failures(failures, args.failures)
    print(f"rewrote {len(records)} ideas, {len(failures)} failures -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    cfg = load_config(args.config)
    ideas = _read_titles(args.ideas)
    refs = _read_titles(args.refs)
    rep = metrics.report(ideas, refs, label=args.label,
                         reference_label=Path(args.refs).name,
                         aggregate=cfg.similarity_aggregate)
    csv_text = metrics.report_to_csv([rep])
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    print(metrics.format_table([rep]))
    return 0


def _cmd_project(args) -> int:
    texts_by_venue: dict[str, list[str]] = {}
    for path in args.ideas:
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            venue = row.get("venue") or Path(path).stem
            texts_by_venue.setdefault(venue, []).append(row.get("title") or row["text"])
    written = run_projection(texts_by_venue, args.out_dir,
                             perplexity=args.perplexity, iterations=args.iterations,
                             seed=args.seed, resolution=args.resolution,
                             bandwidth=args.bandwidth)
    print(f"projection artifacts -> {written['csv'].parent}")
    return 0


def _cmd_coverage(args) -> int:
    cfg = load_config(args.config)
    gw = build_gateway(cfg, cache_dir=args.cache)
    mode = args.mode or cfg.gateway_mode
    loaded, _ = corpus_mod.ingest(args.corpus)
    keys = {(r.venue, r.year) for r in loaded.records}
    registries = {key: _load_venue_registries(args.registry_dir, *key) for key in sorted(keys)}
    threshold = args.threshold if args.threshold is not None else cfg.coverage_threshold
    reports, details = coverage_mod.coverage_report(loaded, registries, gw, mode,
                                                    threshold=threshold)
    csv_text = coverage_mod.reports_to_csv(reports)
    Path(args.out).write_text(csv_text, encoding="utf-8")
    if args.details:
        with open(args.details, "w", encoding="utf-8") as fh:
            for d in details:
                fh.write(json.dumps(d, ensure_ascii=False) + "\n")
    print(csv_text, end="")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    cfg = load_config(args.config)
    gw = build_gateway(cfg, cache_dir=args.cache)
    app = create_app(registry_dir=args.registry_dir, gateway=gw,
                     gateway_mode=args.mode or cfg.gateway_mode,
                     favorites_path=args.favorites, projection_dir=args.projection_dir,
                     spin_top_k=cfg.spin_top_k)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="llull",
                                     description="Combinatorial research-ideation pipeline")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a paper corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--out", required=True)
    p.add_argument("--rejects")
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("extract", help="extract per-paper elements via the model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config")
    p.add_argument("--cache", required=True)
    p.add_argument("--mode", choices=["live", "record", "replay"])
    p.add_argument("--out", required=True)
    p.add_argument("--failures")
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("merge", help="merge drafts into per-venue registries")
    p.add_argument("--corpus", required=True)
    p.add_argument("--drafts", required=True)
    p.add_argument("--config")
    p.add_argument("--cache")
    p.add_argument("--mode", choices=["live", "record", "replay"])
    p.add_argument("--registry-dir", required=True)
    p.add_argument("--all", action="store_true", help="also build the pooled registry")
    p.add_argument("--no-model", action="store_true", help="deterministic pass only")
    p.set_defaults(fn=_cmd_merge)

    p = sub.add_parser("stats", help="per-venue registry statistics")
    p.add_argument("--registry-dir", required=True)
    p.add_argument("--corpus")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("generate", help="spin the machine into raw ideas")
    p.add_argument("--registry-dir", required=True)
    p.add_argument("--venue", required=True)
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--mode", choices=["top", "random"], default="top")
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--template", default="basic")
    p.add_argument("--subsample", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("rewrite", help="rewrite raw ideas into candidate titles")
    p.add_argument("--ideas", required=True)
    p.add_argument("--config")
    p.add_argument("--cache", required=True)
    p.add_argument("--mode", choices=["live", "record", "replay"])
    p.add_argument("--out", required=True)
    p.add_argument("--titles")
    p.add_argument("--failures")
    p.set_defaults(fn=_cmd_rewrite)

    p = sub.add_parser("eval", help="diversity/similarity/relevance report")
    p.add_argument("--ideas", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--label", default="ideas")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("project", help="TF-IDF + t-SNE projection with heatmaps")
    p.add_argument("--ideas", nargs="+", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--bandwidth", type=float)
    p.set_defaults(fn=_cmd_project)

    p = sub.add_parser("coverage", help="decomposition/reconstruction analysis")
    p.add_argument("--corpus", required=True)
    p.add_argument("--registry-dir", required=True)
    p.add_argument("--config")
    p.add_argument("--cache", required=True)
    p.add_argument("--mode", choices=["live", "record", "replay"])
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--details")
    p.set_defaults(fn=_cmd_coverage)

    p = sub.add_parser("serve", help="HTTP API for the explorer UI")
    p.add_argument("--registry-dir", required=True)
    p.add_argument("--config")
    p.add_argument("--cache", required=True)
    p.add_argument("--mode", choices=["live", "record", "replay"])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--favorites", default="favorites.json")
    p.add_argument("--projection-dir")
    p.set_defaults(fn=_cmd_serve)

    return parser


def cli_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LlullError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
