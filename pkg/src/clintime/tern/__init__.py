"""Hybrid temporal expression recognition and normalization."""
from __future__ import annotations

from dataclasses import replace

from .merge import merge_hybrid, post_filter
from .ml import recognize_ml, ter_examples, train_ter
from .normalize import NormContext, detect_modifier, infer_type, normalize
from .rules import TerRule, load_rules, parse_rules, recognize_rules

__all__ = [
    "merge_hybrid", "post_filter", "recognize_ml", "ter_examples", "train_ter", "NormContext",
    "detect_modifier", "infer_type", "normalize", "TerRule", "load_rules", "parse_rules",
    "recognize_rules", "extract_timexes",
]


def extract_timexes(text, tokens, sentences, rules, model=None, ctx: NormContext | None = None,
                    use_rules: bool = True, id_prefix: str = "T") -> list:
    """Rules and/or CRF, merged, filtered, normalized when a context is given."""
    rule_out = recognize_rules(tokens, rules, sentences) if use_rules else []
    ml_out = recognize_ml(tokens, sentences, model) if model is not None else []
    mentions = post_filter(merge_hybrid(rule_out, ml_out), text, tokens)
    if ctx is not None:
        mentions = [normalize(m, text, ctx) for m in mentions]
    else:
        mentions = [replace(m, ttype=m.ttype or infer_type(text[m.span.start:m.span.end]), value="UNK")
                    for m in mentions]
    return [replace(m, id=f"{id_prefix}{i}") for i, m in enumerate(mentions, 1)]
