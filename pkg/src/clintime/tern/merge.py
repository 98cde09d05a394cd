"""Union of rule and CRF temporal mentions, and false-positive filtering."""
from __future__ import annotations

import re
from dataclasses import replace

from ..corpus import Span

CONTEXT_WORDS = frozenset({"ward", "room", "ext", "extension", "fax", "tel", "phone", "bed", "pager", "rm"})
_PHONE = re.compile(r"\(?\d{3}\)?[-. ]?\d{3}[-. ]\d{4}|\d{3}-\d{4}|\d{7,}")
_SLASH2 = re.compile(r"(\d+)/(\d+)")
_SLASH3 = re.compile(r"(\d+)/(\d+)/(\d+)")
PROTECTED = frozenset({"Month", "Weekday"})


def merge_hybrid(rule_out, ml_out) -> list:
    """Union of both outputs.

    An ML mention overlapping no rule mention is kept as is; one overlapping a
    single rule mention is merged into the span union under the rule's type;
    one bridging several rule mentions is dropped so the rule mentions survive.
    """
    rules = sorted(rule_out, key=lambda m: (m.span.start, m.span.end))
    current = list(rules)
    extra = []
    for m in ml_out:
        hits = [i for i, r in enumerate(rules) if r.span.overlaps(m.span)]
        if not hits:
            extra.append(m)
        elif len(hits) == 1:
            cur = current[hits[0]]
            grown = Span(min(cur.span.start, m.span.start), max(cur.span.end, m.span.end))
            current[hits[0]] = replace(cur, span=grown)
    out = {}
    for m in current + extra:
        out.setdefault(m.span, m)
    return sorted(out.values(), key=lambda m: (m.span.start, m.span.end))


def _valid_slash(surface: str) -> bool:
    m = _SLASH3.fullmatch(surface)
    if m:
        a, b, c = (int(x) for x in m.groups())
        if len(m[1]) == 4:  # YYYY/DD/MM
            return 1 <= c <= 12 and 1 <= b <= 31
        return 1 <= a <= 12 and 1 <= b <= 31
    m = _SLASH2.fullmatch(surface)
    if m:
        a, b = int(m[1]), int(m[2])
        return 1 <= a <= 12 and 1 <= b <= 31
    return True


def post_filter(mentions, text: str, tokens) -> list:
    """Drop measurement-like slash pairs, phone numbers and ward/room numbers.

    A mention containing a Month or Weekday token is always kept.
    """
    kept = []
    for m in mentions:
        inside = [i for i, t in enumerate(tokens) if t.start < m.span.end and t.end > m.span.start]
        if any(PROTECTED & tokens[i].gazetteer_tags for i in inside):
            kept.append(m)
            continue
        surface = text[m.span.start:m.span.end].strip()
        if len(surface) <= 1 or not _valid_slash(surface) or _PHONE.search(surface):
            continue
        prev = inside[0] - 1 if inside else -1
        while prev >= 0 and tokens[prev].kind in ("Punctuation", "Symbol") and inside[0] - prev <= 2:
            prev -= 1
        if prev >= 0 and tokens[prev].text.lower().rstrip(".:") in CONTEXT_WORDS:
            continue
        kept.append(m)
    return kept
