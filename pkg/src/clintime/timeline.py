"""Chronological event ordering from normalized dates and links to section times."""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass

from .corpus import SECTIME_META, ST_ADMISSION, ST_DCT, ST_DISCHARGE
from .tlink.graph import BEFORE, OVERLAP, TemporalGraph

COLUMNS = ("anchor_id", "surface", "resolved_date", "relation_to_dct", "sort_date", "note")


@dataclass(frozen=True)
class TimelineRow:
    anchor_id: str
    surface: str
    resolved_date: str | None
    relation_to_dct: str  # Before, After, Overlap or Unknown
    sort_date: str | None = None
    note: str = ""


def _day(value: str) -> str | None:
    m = re.match(r"\d{4}-\d{2}-\d{2}", value or "")
    return m[0] if m else None


def build_timeline(adoc) -> list[TimelineRow]:
    """Rows sorted by date, then document order; undated events come last as Unknown.

    An event without its own date sorts just before, at or just after the
    date of a section time it is linked to (Before / Overlap / After).
    """
    dates = {st: adoc.doc.meta[key] for st, key in SECTIME_META.items() if key in adoc.doc.meta}
    for t in adoc.timexes:
        if t.ttype in ("Date", "Time") and _day(t.value):
            dates[t.id] = _day(t.value)
    result = TemporalGraph.from_links(adoc.tlinks).closure()
    conflicted = {x for p in result.conflicts for x in p}
    ref = next((st for st in (ST_DCT, ST_DISCHARGE, ST_ADMISSION) if st in dates), None)

    rels = {}
    for a, b, rel in result.facts:
        if rel == OVERLAP:
            rels.setdefault(a, []).append((b, OVERLAP))
            rels.setdefault(b, []).append((a, OVERLAP))
        else:
            rels.setdefault(a, []).append((b, BEFORE))
            rels.setdefault(b, []).append((a, "After"))

    keyed = []
    for order, ev in enumerate(sorted(adoc.events, key=lambda e: (e.span.start, e.span.end))):
        links = sorted(rels.get(ev.id, []))
        same = sorted(dates[n] for n, r in links if r == OVERLAP and n in dates)
        before = sorted(dates[n] for n, r in links if r == BEFORE and n in dates)
        after = sorted(dates[n] for n, r in links if r == "After" and n in dates)
        resolved = same[0] if same else None
        if resolved:
            key = (resolved, 1)
        elif before:
            key = (before[0], 0)
        elif after:
            key = (after[-1], 2)
        else:
            key = None
        to_ref = "Unknown"
        if ref is not None:
            to_ref = next((r for n, r in links if n == ref), "Unknown")
        note = "conflicting links" if ev.id in conflicted else ""
        if note:
            key = None
        row = TimelineRow(ev.id, adoc.surface(ev.span), resolved, to_ref, key[0] if key else None, note)
        keyed.append(((0, key, order) if key else (1, ("", 0), order), row))
    keyed.sort(key=lambda kr: kr[0])
    return [row for _, row in keyed]


def timeline_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r.anchor_id, r.surface, r.resolved_date or "", r.relation_to_dct, r.sort_date or "", r.note])
    return buf.getvalue()
