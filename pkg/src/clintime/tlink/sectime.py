"""Section-time links: events anchored to admission, discharge or record dates."""
from __future__ import annotations

import re
from pathlib import Path

from ..corpus import ST_ADMISSION, ST_DCT, ST_DISCHARGE, Span
from ..errors import MissingAnchorDate

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
SECTION_ANCHORS = {"history": ST_ADMISSION, "course": ST_DISCHARGE}
_HEADER_DATE = re.compile(
    r"^\s*(admission|admit|discharge|record|document|report)\s+date\s*:?\s*(\S.*)?$", re.IGNORECASE | re.MULTILINE)


def load_section_lexicon(path=DATA_DIR / "section_lexicon.tsv") -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            header, label = line.split("\t")
            out[header.strip().lower()] = label.strip()
    return out


def load_routine_lexicon(path=DATA_DIR / "routine_lexicon.txt") -> frozenset:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(ln.strip().lower() for ln in lines if ln.strip() and not ln.startswith("#"))


def detect_sections(text: str, lexicon: dict[str, str]) -> list[tuple[str, Span]]:
    """Header lines (optionally ending in a colon) open a section that runs to the next header."""
    headers = sorted(lexicon, key=len, reverse=True)
    found = []
    pos = 0
    for line in text.splitlines(keepends=True):
        body = line.strip().lower()
        for h in headers:
            if body == h or body == h + ":" or body.startswith(h + ":"):
                found.append((lexicon[h], pos))
                break
        pos += len(line)
    return [(label, Span(start, found[i + 1][1] if i + 1 < len(found) else len(text)))
            for i, (label, start) in enumerate(found)]


def header_dates(text: str, timexes) -> dict[str, str]:
    """Admission/discharge/record dates from ``Admission Date: ...`` style lines.

    The date is the first normalized full Date mention on the header line or
    the line after it.
    """
    keys = {"admission": "admission", "admit": "admission", "discharge": "discharge",
            "record": "dct", "document": "dct", "report": "dct"}
    out = {}
    for m in _HEADER_DATE.finditer(text):
        key = keys[m[1].lower()]
        line_end = text.find("\n", m.end())
        next_end = text.find("\n", line_end + 1) if line_end >= 0 else -1
        limit = len(text) if next_end < 0 else next_end
        for t in sorted(timexes, key=lambda t: t.span.start):
            if m.start() <= t.span.start < limit and t.ttype == "Date" and re.fullmatch(r"\d{4}-\d{2}-\d{2}", t.value):
                out.setdefault(key, t.value)
                break
    return out


def extract_sectime(events, meta: dict, sections, surface, routine: frozenset) -> list[tuple]:
    """``(source, target, relation)`` triples linking events to section times.

    With admission/discharge dates, events under history-like sections link
    Before the admission, hospital-course events Before the discharge.  With
    only a record date, every event links to it, Before by default and Overlap
    for routine measurements.  Raises MissingAnchorDate when neither exists.
    """
    if not events:
        return []
    has_sections = "admission" in meta or "discharge" in meta
    if not has_sections and "dct" not in meta:
        raise MissingAnchorDate("no admission, discharge or record date")
    out = []
    if has_sections:
        for ev in events:
            label = next((lab for lab, span in sections if span.start <= ev.span.start < span.end), None)
            anchor = SECTION_ANCHORS.get(label)
            if anchor and (anchor != ST_ADMISSION or "admission" in meta) and (anchor != ST_DISCHARGE or "discharge" in meta):
                out.append((ev.id, anchor, "Before"))
        return out
    for ev in events:
        words = re.sub(r"^(?:(?:his|her|their|the|a|an|patient's)\s+)+", "",
                       " ".join(re.findall(r"[\w']+", surface(ev.span).lower())))
        out.append((ev.id, ST_DCT, "Overlap" if words in routine else "Before"))
    return out
