"""Rule-based temporal link extraction and temporal closure."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus import ST_ADMISSION, ST_DISCHARGE, TLink
from ..errors import MissingAnchorDate
from ..strsim import SoftTfidfParams, build_stats
from .coref import COREF_THRESHOLD, extract_coref
from .graph import (
    ClosureResult, TemporalGraph, closure_facts, conflicts_of, consistent_subset, fact, reduce,
    transitive_closure,
)
from .intra import IntraRule, extract_intra, load_intra_rules, parse_intra_rules
from .sectime import (
    detect_sections, extract_sectime, header_dates, load_routine_lexicon, load_section_lexicon,
)

__all__ = [
    "ClosureResult", "TemporalGraph", "closure_facts", "conflicts_of", "consistent_subset", "fact",
    "reduce", "transitive_closure", "IntraRule", "extract_intra", "load_intra_rules",
    "parse_intra_rules", "detect_sections", "extract_sectime", "header_dates",
    "load_routine_lexicon", "load_section_lexicon", "extract_coref", "TlinkConfig", "extract_all",
    "links_from_facts",
]


@dataclass(frozen=True)
class TlinkConfig:
    intra_rules: tuple = field(default_factory=load_intra_rules)
    section_lexicon: dict = field(default_factory=load_section_lexicon)
    routine: frozenset = field(default_factory=load_routine_lexicon)
    coref_threshold: float = COREF_THRESHOLD
    sim_params: SoftTfidfParams = field(default_factory=SoftTfidfParams)
    intra: bool = True
    sectime: bool = True
    coref: bool = True
    closure: bool = False


def links_from_facts(facts, origin: str, start: int = 1) -> list[TLink]:
    return [TLink(f"L{i}", a, b, rel, origin) for i, (a, b, rel) in enumerate(sorted(facts), start)]


def extract_all(adoc, sentences, cfg: TlinkConfig | None = None, stats=None):
    """Intra-sentence, section-time and co-reference links, then optional closure.

    Returns ``(links, warnings)``.  When two stages link the same pair, the
    earlier stage's link is kept.  ``stats`` are SoftTFIDF corpus statistics;
    when omitted they are built from this document's event surfaces.
    """
    cfg = cfg or TlinkConfig()
    surface = adoc.surface
    anchors = [*adoc.events, *adoc.timexes]
    warnings = []
    staged = []

    if cfg.intra:
        for sent in sentences:
            staged.extend(extract_intra(adoc.tokens, sent, anchors, cfg.intra_rules))
    if cfg.sectime:
        meta = adoc.doc.meta
        if "admission" in meta and "discharge" in meta:
            staged.append((ST_ADMISSION, ST_DISCHARGE, "Before", "Sectime"))
        sections = adoc.sections or tuple(detect_sections(adoc.text, cfg.section_lexicon))
        try:
            staged.extend((*t, "Sectime") for t in extract_sectime(adoc.events, meta, sections, surface, cfg.routine))
        except MissingAnchorDate as exc:
            warnings.append(f"{adoc.id}: MissingAnchorDate: {exc}")
    if cfg.coref and len(adoc.events) > 1:
        if stats is None:
            stats = build_stats(surface(e.span) for e in adoc.events)
        staged.extend((*t, "Coref") for t in extract_coref(
            adoc.events, surface, stats, cfg.coref_threshold, cfg.sim_params))

    links, seen = [], set()
    for src, tgt, rel, origin in staged:
        key = frozenset((src, tgt))
        if src == tgt or key in seen:
            continue
        seen.add(key)
        links.append(TLink(f"L{len(links) + 1}", src, tgt, rel, origin))

    if cfg.closure and links:
        result = TemporalGraph.from_links(links).closure()
        if result.conflicts:
            pairs = sorted(" ".join(sorted(p)) for p in result.conflicts)
            warnings.append(f"{adoc.id}: {len(pairs)} conflicting pair(s) left unclosed: {'; '.join(pairs)}")
        links.extend(links_from_facts(result.derived, "Closure", len(links) + 1))
    return links, warnings
