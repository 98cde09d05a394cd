"""Configuration, model training and the document tagging pipeline."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from datetime import date
from pathlib import Path

from .corpus import (
    EVENT_CATEGORIES, AnnotatedDocument, Document, dumps_standoff, iter_corpus, read_standoff, validate,
)
from .crf import CrfModel, EVENT_TEMPLATE_TEXT, encode_labels, event_matrix, parse_templates, train
from .crf.schema import SCHEMA_LABELS
from .errors import ClintimeError, ConfigError, EmptyCorpus, OverlappingMentions
from .events import NegationLexicon, PostprocessConfig, extract_events
from .events.postprocess import DATA_DIR, load_lexicon
from .preproc import BaselineTagger, Gazetteer, preprocess
from .preproc.gazetteer import DEFAULT_DIR as GAZETTEER_DIR
from .strsim import SoftTfidfParams, build_stats
from .tern import NormContext, load_rules, merge_hybrid, normalize, post_filter, recognize_ml, recognize_rules
from .tern import ter_examples, train_ter
from .tern.rules import DEFAULT_RULES
from .tlink import TlinkConfig, extract_all, header_dates, load_intra_rules, load_routine_lexicon
from .tlink import load_section_lexicon

log = logging.getLogger(__name__)

_PATHS = {
    "models_dir": None,
    "ter_rules": DEFAULT_RULES,
    "gazetteer_dir": GAZETTEER_DIR,
    "intra_rules": DATA_DIR / "intra_rules.tsv",
    "section_lexicon": DATA_DIR / "section_lexicon.tsv",
    "routine_lexicon": DATA_DIR / "routine_lexicon.txt",
    "negation_triggers": DATA_DIR / "negation_triggers.tsv",
    "negation_terminators": DATA_DIR / "negation_terminators.txt",
    "fp_lexicon": DATA_DIR / "fp_lexicon.txt",
}
_FLAGS = {
    "events": True, "tern": True, "tlink": True, "closure": False,
    "ter_rules_enabled": True, "ter_ml": True,
    "label_fixer": True, "boundary_adjust": True, "fp_filter": True, "negation": True,
    "constrained_decoding": False, "intra": True, "sectime": True, "coref": True,
}
_NUMBERS = {"workers": (int, 1), "seed": (int, 0), "max_iter": (int, 200), "c": (float, 1.0),
            "eta": (float, 1e-4), "coref_threshold": (float, 0.8), "inner_threshold": (float, 0.9)}
DEFAULT_SCHEMAS = {"Problem": "BIO", "Treatment": "BIO", "Test": "WBIO"}


@dataclass(frozen=True)
class PipelineConfig:
    paths: dict = field(default_factory=lambda: dict(_PATHS))
    flags: dict = field(default_factory=lambda: dict(_FLAGS))
    workers: int = 1
    seed: int = 0
    max_iter: int = 200
    c: float = 1.0
    eta: float = 1e-4
    coref_threshold: float = 0.8
    inner_threshold: float = 0.9
    schemas: dict = field(default_factory=lambda: dict(DEFAULT_SCHEMAS))

    def path(self, key):
        return self.paths[key]

    def flag(self, key) -> bool:
        return self.flags[key]

    def with_overrides(self, **kw) -> "PipelineConfig":
        paths = {**self.paths, **{k: Path(v) for k, v in kw.items() if k in _PATHS and v is not None}}
        flags = {**self.flags, **{k: v for k, v in kw.items() if k in _FLAGS and v is not None}}
        plain = {k: v for k, v in kw.items() if k in {f.name for f in fields(self)} and v is not None}
        return replace(self, paths=paths, flags=flags, **plain)


def _bool(value: str, where: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {value!r}")


def _read_pairs(path: Path, seen: tuple = ()) -> list[tuple[str, str, str, Path]]:
    path = path.resolve()
    if path in seen:
        raise ConfigError(f"{path}: include cycle")
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    out = []
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        if key == "include":
            out.extend(_read_pairs(path.parent / value, seen + (path,)))
        else:
            out.append((key, value, f"{path}:{n}", path.parent))
    return out


def load_config(path=None) -> PipelineConfig:
    """Read a ``key = value`` file; ``include = other.cfg`` pulls in another file first.

    Relative paths resolve against the file that mentions them; later keys win.
    """
    cfg = PipelineConfig()
    if path is None:
        return cfg
    paths, flags, schemas, plain = dict(cfg.paths), dict(cfg.flags), dict(cfg.schemas), {}
    for key, value, where, base in _read_pairs(Path(path)):
        if key in _PATHS:
            p = Path(value)
            p = p if p.is_absolute() else base / p
            if key != "models_dir" and not p.exists():
                raise ConfigError(f"{where}: {key} path does not exist: {p}")
            paths[key] = p
        elif key in _FLAGS:
            flags[key] = _bool(value, where)
        elif key in _NUMBERS:
            kind, _ = _NUMBERS[key]
            try:
                plain[key] = kind(value)
            except ValueError:
                raise ConfigError(f"{where}: {key} must be {kind.__name__}, got {value!r}") from None
        elif key.startswith("schema."):
            cat = key.split(".", 1)[1]
            if cat not in EVENT_CATEGORIES:
                raise ConfigError(f"{where}: unknown event category {cat!r}")
            if value not in SCHEMA_LABELS:
                raise ConfigError(f"{where}: schema must be one of IO, BIO, WBIO, got {value!r}")
            schemas[cat] = value
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")
    if plain.get("workers", 1) < 1:
        raise ConfigError(f"{path}: workers must be at least 1")
    return replace(cfg, paths=paths, flags=flags, schemas=schemas, **plain)


# --- resources ----------------------------------------------------------------


@dataclass(frozen=True)
class Resources:
    gazetteer: Gazetteer
    ter_rules: tuple
    event_models: dict
    ter_model: CrfModel | None
    negation: NegationLexicon | None
    postprocess: PostprocessConfig
    tlink: TlinkConfig


def model_paths(models_dir) -> dict:
    d = Path(models_dir)
    return {**{c: d / f"event-{c}.json" for c in EVENT_CATEGORIES}, "TIMEX": d / "ter.json"}


def load_resources(cfg: PipelineConfig) -> Resources:
    models, ter_model = {}, None
    if cfg.path("models_dir") is not None:
        for key, p in model_paths(cfg.path("models_dir")).items():
            if p.exists():
                if key == "TIMEX":
                    ter_model = CrfModel.load(p)
                else:
                    models[key] = CrfModel.load(p)
    negation = None
    if cfg.flag("negation"):
        negation = NegationLexicon.load(cfg.path("negation_triggers"), cfg.path("negation_terminators"))
    post = PostprocessConfig(cfg.flag("label_fixer"), cfg.flag("boundary_adjust"), cfg.flag("fp_filter"),
                             load_lexicon(cfg.path("fp_lexicon")))
    tl = TlinkConfig(load_intra_rules(cfg.path("intra_rules")), load_section_lexicon(cfg.path("section_lexicon")),
                     load_routine_lexicon(cfg.path("routine_lexicon")), cfg.coref_threshold,
                     SoftTfidfParams(cfg.inner_threshold), cfg.flag("intra"), cfg.flag("sectime"),
                     cfg.flag("coref"), cfg.flag("closure"))
    return Resources(Gazetteer.load(cfg.path("gazetteer_dir")), load_rules(cfg.path("ter_rules")), models,
                     ter_model, negation, post, tl)


# --- training -----------------------------------------------------------------


def event_examples(tokens, sentences, events, category: str, schema: str) -> list[tuple]:
    out = []
    for sent in sentences:
        toks = tokens[sent.token_start:sent.token_end]
        if not toks:
            continue
        inside = [e for e in events if e.category == category and sent.span.start <= e.span.start < sent.span.end]
        try:
            labels = encode_labels(inside, toks, schema)
        except OverlappingMentions:
            continue
        out.append((event_matrix(toks), labels))
    return out


def training_examples(adocs, cfg: PipelineConfig, gazetteer: Gazetteer):
    events = {c: [] for c in EVENT_CATEGORIES}
    timex = []
    for adoc in adocs:
        tokens, sentences = preprocess(adoc.text, gazetteer)
        for cat in EVENT_CATEGORIES:
            events[cat].extend(event_examples(tokens, sentences, adoc.events, cat, cfg.schemas[cat]))
        timex.extend(ter_examples(tokens, sentences, adoc.timexes))
    return events, timex


def train_models(cfg: PipelineConfig, adocs, out_dir) -> dict:
    """Fit one CRF per event category plus the IO timex model and save them as JSON."""
    adocs = list(adocs)
    if not adocs:
        raise EmptyCorpus("no training documents")
    gaz = Gazetteer.load(cfg.path("gazetteer_dir"))
    events, timex = training_examples(adocs, cfg, gaz)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = model_paths(out_dir)
    hyper = {"c": cfg.c, "eta": cfg.eta}
    summary = {}
    templates = parse_templates(EVENT_TEMPLATE_TEXT)
    for cat in EVENT_CATEGORIES:
        if not events[cat]:
            raise EmptyCorpus(f"no sentences to train the {cat} model")
        model = train(events[cat], cfg.schemas[cat], templates, hyper=hyper, max_iter=cfg.max_iter, seed=cfg.seed)
        model.save(paths[cat])
        summary[cat] = _summary(model, len(events[cat]))
    if cfg.flag("ter_ml"):
        if not timex:
            raise EmptyCorpus("no sentences to train the timex model")
        model = train_ter(timex, hyper=hyper, max_iter=cfg.max_iter, seed=cfg.seed)
        model.save(paths["TIMEX"])
        summary["TIMEX"] = _summary(model, len(timex))
    return summary


def _summary(model: CrfModel, n_sentences: int) -> dict:
    return {"sentences": n_sentences, "features": len(model.feature_index), "labels": list(model.labels),
            "schema": model.schema, "objective": model.history[-1] if model.history else float("nan"),
            "iterations": max(len(model.history) - 1, 0)}


# --- tagging ------------------------------------------------------------------

_PROBE_ANCHORS = (date(2000, 1, 1), date(2001, 7, 15))


def _anchor(meta: dict):
    for key in ("admission", "dct", "discharge"):
        if key in meta:
            return date.fromisoformat(meta[key])
    return None


def _normalize_all(mentions, text, anchor):
    """Normalize against ``anchor``; without one, anchor-dependent values become UNK."""
    if anchor is not None:
        return [normalize(m, text, NormContext(anchor)) for m in mentions]
    out = []
    for m in mentions:
        a, b = (normalize(m, text, NormContext(p)) for p in _PROBE_ANCHORS)
        out.append(a if a.value == b.value else replace(a, value="UNK"))
    return out


def annotate_mentions(doc: Document, res: Resources, cfg: PipelineConfig):
    """Events and normalized timexes; header dates fill missing admission/discharge/record dates."""
    tokens, sentences = preprocess(doc.text, res.gazetteer, BaselineTagger())
    events = []
    if cfg.flag("events") and res.event_models:
        events = extract_events(doc.text, tokens, sentences, res.event_models, res.postprocess,
                                res.negation, cfg.flag("constrained_decoding"))
    timexes, meta = [], dict(doc.meta)
    if cfg.flag("tern"):
        rule_out = recognize_rules(tokens, res.ter_rules, sentences) if cfg.flag("ter_rules_enabled") else []
        ml_out = recognize_ml(tokens, sentences, res.ter_model) if cfg.flag("ter_ml") and res.ter_model else []
        found = post_filter(merge_hybrid(rule_out, ml_out), doc.text, tokens)
        probe = _normalize_all(found, doc.text, None)
        for key, value in header_dates(doc.text, probe).items():
            meta.setdefault(key, value)
        timexes = [replace(m, id=f"T{i}") for i, m in enumerate(_normalize_all(found, doc.text, _anchor(meta)), 1)]
    adoc = AnnotatedDocument(Document(doc.id, doc.text, meta), tuple(tokens), tuple(events), tuple(timexes))
    return adoc, sentences


def annotate_links(adoc: AnnotatedDocument, sentences, res: Resources, stats, cfg: PipelineConfig):
    if not cfg.flag("tlink"):
        return adoc, []
    links, warnings = extract_all(adoc, sentences, res.tlink, stats)
    return adoc.with_annotations(tlinks=links), warnings


def read_input(path: Path) -> Document:
    """A standoff file (annotations ignored) or a plain-text note named ``<id>.txt``."""
    if path.suffix == ".ann":
        return read_standoff(path, check_values=False).doc
    return Document(path.stem, path.read_text(encoding="utf-8"), {})


def input_files(in_dir) -> list[Path]:
    in_dir = Path(in_dir)
    anns = iter_corpus(in_dir, ".ann")
    have = {p.stem for p in anns}
    txts = [p for p in iter_corpus(in_dir, ".txt") if p.stem not in have]
    return sorted(anns + txts, key=lambda p: p.stem)


_WORKER: dict = {}


def _init_worker(cfg: PipelineConfig) -> None:
    logging.getLogger("clintime").setLevel(logging.WARNING)
    _WORKER["cfg"] = cfg
    _WORKER["res"] = load_resources(cfg)


def _stage_mentions(path: Path):
    try:
        doc = read_input(path)
        adoc, sentences = annotate_mentions(doc, _WORKER["res"], _WORKER["cfg"])
        return path.stem, (adoc, sentences), None
    except (ClintimeError, UnicodeDecodeError, OSError, ValueError) as exc:
        return path.stem, None, f"{type(exc).__name__}: {exc}"


def _stage_links(job):
    doc_id, adoc, sentences, stats = job
    try:
        adoc, warnings = annotate_links(adoc, sentences, _WORKER["res"], stats, _WORKER["cfg"])
        validate(adoc)
        return doc_id, dumps_standoff(adoc), warnings, None
    except ClintimeError as exc:
        return doc_id, None, [], f"{type(exc).__name__}: {exc}"


class _Serial:
    def __init__(self, cfg):
        _init_worker(cfg)

    def map(self, fn, items, chunksize=1):
        return map(fn, items)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


@dataclass
class TagSummary:
    written: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def tag_directory(cfg: PipelineConfig, in_dir, out_dir, workers: int | None = None) -> TagSummary:
    """Tag every ``.ann``/``.txt`` document; failures go to ``errors.log``, the rest continue.

    Output is independent of the worker count.  SoftTFIDF statistics are built
    from the event surfaces of the whole batch.
    """
    workers = workers or cfg.workers
    files = input_files(in_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = TagSummary()
    pool = _Serial(cfg) if workers == 1 else ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg,))
    with pool:
        staged = []
        for doc_id, result, err in pool.map(_stage_mentions, files, chunksize=4):
            if err:
                summary.errors[doc_id] = err
            else:
                staged.append((doc_id, *result))
        surfaces = [a.surface(e.span) for _, a, _ in staged for e in a.events]
        stats = build_stats(surfaces) if surfaces else None
        jobs = [(doc_id, adoc, sents, stats) for doc_id, adoc, sents in staged]
        for doc_id, text, warnings, err in pool.map(_stage_links, jobs, chunksize=4):
            if err:
                summary.errors[doc_id] = err
                continue
            path = out_dir / f"{doc_id}.ann"
            path.write_text(text, encoding="utf-8", newline="\n")
            summary.written.append(path)
            summary.warnings.extend(warnings)
    log_path = out_dir / "errors.log"
    if summary.errors:
        log_path.write_text("".join(f"{k}\t{v}\n" for k, v in sorted(summary.errors.items())),
                            encoding="utf-8", newline="\n")
    elif log_path.exists():
        log_path.unlink()
    return summary
