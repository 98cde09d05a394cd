"""Clinical EVENT extraction: per-category CRF decoding, post-processing, negation."""
from __future__ import annotations

from dataclasses import replace

from ..corpus import EVENT_CATEGORIES, EventMention, Span
from ..crf import decode_labels, event_matrix
from .negation import NegationLexicon, NegationRule, detect_negation
from .postprocess import PostprocessConfig, boundary_adjust, fp_filter, label_fix

__all__ = [
    "NegationLexicon", "NegationRule", "detect_negation", "PostprocessConfig",
    "boundary_adjust", "fp_filter", "label_fix", "extract_events",
]


def extract_events(text, tokens, sentences, models: dict, cfg: PostprocessConfig | None = None,
                   negation: NegationLexicon | None = None, constrained: bool = False,
                   id_prefix: str = "E") -> list[EventMention]:
    """Run each category model independently and post-process its mentions.

    Order per category: label fixing, decoding to spans, boundary adjustment,
    false-positive filtering.  Mentions of different categories may overlap.
    Negation runs last when a lexicon is given.
    """
    cfg = cfg or PostprocessConfig()
    found = []
    for category in EVENT_CATEGORIES:
        model = models.get(category)
        if model is None:
            continue
        for sent in sentences:
            toks = tokens[sent.token_start:sent.token_end]
            if not toks:
                continue
            labels = model.decode(event_matrix(toks), constrained=constrained)
            if cfg.enable_label_fixer and model.schema in ("BIO", "WBIO"):
                labels = label_fix(labels, model.schema)
            spans = []
            for s, e in decode_labels(labels, toks, model.schema):
                s, e = s + sent.token_start, e + sent.token_start
                if cfg.enable_boundary_adjust:
                    s, e = boundary_adjust(s, e, tokens, sent.token_start, sent.token_end,
                                           cfg.boundary_pos_tags, cfg.boundary_chunk_tags)
                if (s, e) not in spans:
                    spans.append((s, e))
            mentions = [EventMention("", Span(tokens[s].start, tokens[e - 1].end), category) for s, e in spans]
            if cfg.enable_fp_filter:
                mentions = fp_filter(mentions, text, cfg)
            if negation is not None:
                mentions = detect_negation(mentions, toks, negation)
            found.extend(mentions)
    found.sort(key=lambda m: (m.span.start, m.span.end, EVENT_CATEGORIES.index(m.category)))
    return [replace(m, id=f"{id_prefix}{i}") for i, m in enumerate(found, 1)]
