"""Command-line entry point: train, tag, eval, timeline, gen-synthetic."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .corpus import iter_corpus, read_standoff, write_standoff
from .errors import DataError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_THRESHOLD = 0, 1, 2, 3
log = logging.getLogger("clintime")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _config(args):
    from .pipeline import load_config

    overrides = {}
    if getattr(args, "models", None):
        overrides["models_dir"] = args.models
    if getattr(args, "workers", None):
        overrides["workers"] = args.workers
    if getattr(args, "closure", False):
        overrides["closure"] = True
    if getattr(args, "no_ter_ml", False):
        overrides["ter_ml"] = False
    for cat in ("Problem", "Treatment", "Test"):
        value = getattr(args, f"schema_{cat.lower()}", None)
        if value:
            cfg_schemas = overrides.setdefault("schemas", {})
            cfg_schemas[cat] = value
    cfg = load_config(args.config)
    if "schemas" in overrides:
        overrides["schemas"] = {**cfg.schemas, **overrides["schemas"]}
    return cfg.with_overrides(**overrides)


def cmd_train(args) -> int:
    from .pipeline import train_models

    cfg = _config(args)
    files = iter_corpus(args.corpus)
    adocs = [read_standoff(p) for p in files]
    summary = train_models(cfg, adocs, args.out)
    for name, s in summary.items():
        print(f"{name}\tschema={s['schema']}\tsentences={s['sentences']}\tfeatures={s['features']}\t"
              f"iterations={s['iterations']}\tobjective={s['objective']:.6f}")
    return EXIT_OK


def cmd_tag(args) -> int:
    from .pipeline import tag_directory

    cfg = _config(args)
    summary = tag_directory(cfg, args.input, args.output, args.workers)
    for w in summary.warnings:
        log.warning(w)
    print(f"tagged {len(summary.written)} document(s); {len(summary.errors)} quarantined")
    return EXIT_OK


def _load_dir(d) -> dict:
    return {p.stem: read_standoff(p) for p in iter_corpus(d)}


def cmd_eval(args) -> int:
    from .evaluation import evaluate

    gold, sys_docs = _load_dir(args.gold), _load_dir(args.system)
    extra = sorted(set(sys_docs) - set(gold))
    if extra:
        raise DataError(f"system documents without gold counterpart: {', '.join(extra)}")
    report = evaluate(gold, sys_docs, args.tlink_subset)
    print(report.to_text(), end="")
    if args.out:
        report.write(args.out)
        if not args.no_figures:
            from .plots import report_figure

            report_figure(report, Path(args.out) / "scores.png")
    vals = report.values()
    failed = []
    for flag, key in (("min_event_f1", "event.micro.strict.f1"), ("min_primary", "timex.primary_score"),
                      ("min_tlink_f1", "tlink.tempeval3.f1")):
        limit = getattr(args, flag)
        if limit is not None and vals[key] < limit:
            failed.append(f"{key}={vals[key]:.4f} < {limit}")
    for f in failed:
        print(f"threshold failed: {f}", file=sys.stderr)
    return EXIT_THRESHOLD if failed else EXIT_OK


def cmd_timeline(args) -> int:
    from .timeline import build_timeline, timeline_csv

    adoc = read_standoff(args.input)
    rows = build_timeline(adoc)
    text = timeline_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    if args.figure:
        from .plots import timeline_figure

        timeline_figure(rows, args.figure, adoc.id)
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    from .synthetic import generate_corpus

    out = Path(args.out)
    (out / "gold").mkdir(parents=True, exist_ok=True)
    (out / "text").mkdir(parents=True, exist_ok=True)
    docs = generate_corpus(args.docs, args.seed)
    for adoc in docs:
        write_standoff(adoc, out / "gold" / f"{adoc.id}.ann")
        (out / "text" / f"{adoc.id}.txt").write_text(adoc.text, encoding="utf-8", newline="\n")
    print(f"wrote {len(docs)} document(s) to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clintime", description="Clinical events, temporal expressions and temporal links.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_config(sp):
        sp.add_argument("--config", help="key = value configuration file")
        sp.add_argument("--schema-problem", choices=("IO", "BIO", "WBIO"))
        sp.add_argument("--schema-treatment", choices=("IO", "BIO", "WBIO"))
        sp.add_argument("--schema-test", choices=("IO", "BIO", "WBIO"))
        sp.add_argument("--no-ter-ml", action="store_true", help="rules only for temporal expressions")

    sp = sub.add_parser("train", help="fit event and timex CRF models from standoff gold files")
    with_config(sp)
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True, help="model directory")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("tag", help="run the full pipeline over a directory of notes")
    with_config(sp)
    sp.add_argument("--models", help="model directory (overrides models_dir)")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--closure", action="store_true", help="add links implied by transitive closure")
    sp.set_defaults(func=cmd_tag)

    sp = sub.add_parser("eval", help="score system standoff files against gold")
    sp.add_argument("--gold", required=True)
    sp.add_argument("--system", required=True)
    sp.add_argument("--out", help="directory for report.txt, report.tsv and scores.png")
    sp.add_argument("--tlink-subset", choices=("sectime", "intra", "inter"))
    sp.add_argument("--no-figures", action="store_true")
    sp.add_argument("--min-event-f1", type=float)
    sp.add_argument("--min-primary", type=float)
    sp.add_argument("--min-tlink-f1", type=float)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("timeline", help="order the events of one tagged document")
    sp.add_argument("--input", required=True, help="standoff file")
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--figure", help="PNG path")
    sp.set_defaults(func=cmd_timeline)

    sp = sub.add_parser("gen-synthetic", help="write a synthetic annotated corpus")
    sp.add_argument("--out", required=True)
    sp.add_argument("--docs", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_gen_synthetic)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("clintime: error: --workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except DataError as exc:
        print(f"clintime: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"clintime: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
