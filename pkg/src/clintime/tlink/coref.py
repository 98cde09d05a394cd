"""Co-referential event links by SoftTFIDF surface similarity."""
from __future__ import annotations

from ..strsim import SoftTfidfParams, soft_tfidf

COREF_THRESHOLD = 0.8


def extract_coref(events, surface, stats, threshold: float = COREF_THRESHOLD,
                  params: SoftTfidfParams | None = None) -> list[tuple]:
    """Overlap triples for every event pair scoring at least ``threshold``."""
    evs = sorted(events, key=lambda e: (e.span.start, e.span.end, e.id))
    texts = [surface(e.span) for e in evs]
    out = []
    for i in range(len(evs)):
        for j in range(i + 1, len(evs)):
            if soft_tfidf(texts[i], texts[j], stats, params) >= threshold:
                out.append((evs[i].id, evs[j].id, "Overlap"))
    return out
