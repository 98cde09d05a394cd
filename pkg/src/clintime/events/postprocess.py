"""Post-processing of raw CRF event predictions."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from ..corpus import EventMention, Span

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

DEFAULT_BOUNDARY_POS = frozenset({"NN", "NNS", "NNP", "NNPS", "JJ", "JJR", "JJS", "DT", "PRP$"})
DEFAULT_BOUNDARY_CHUNKS = frozenset({"B-NP", "I-NP"})


def load_lexicon(path) -> frozenset:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(ln.strip().lower() for ln in lines if ln.strip() and not ln.startswith("#"))


@dataclass(frozen=True)
class PostprocessConfig:
    enable_label_fixer: bool = True
    enable_boundary_adjust: bool = True
    enable_fp_filter: bool = True
    fp_lexicon: frozenset = field(default_factory=lambda: load_lexicon(DATA_DIR / "fp_lexicon.txt"))
    boundary_pos_tags: frozenset = DEFAULT_BOUNDARY_POS
    boundary_chunk_tags: frozenset = DEFAULT_BOUNDARY_CHUNKS


def _fix_pass(seq: list) -> bool:
    changed = False
    n = len(seq)
    for i in range(n):
        cur = seq[i]
        nxt = seq[i + 1] if i + 1 < n else None
        after = seq[i + 2] if i + 2 < n else None
        if cur in ("O", "W") and nxt == "I":                  # a: O I   -> B I
            seq[i] = "B"
        elif cur == "B" and nxt == "O" and after == "O":      # b: B O O -> B I O
            seq[i + 1] = "I"
        elif cur == "B" and nxt == "O" and after == "I":      # c: B O I -> B I I
            seq[i + 1] = "I"
        elif cur == "I" and nxt == "B" and after == "I":      # d: I B I -> I I I
            seq[i + 1] = "I"
        else:
            continue
        changed = True
    if n and seq[0] == "I":
        # rule a at the sentence edge: nothing precedes the run, so it opens itself
        seq[0] = "B"
        changed = True
    return changed


def label_fix(seq: Sequence[str], schema: str | None = None) -> list[str]:
    """Apply the four label-fixer rewrites left to right until nothing changes.

    a. ``O I`` -> ``B I``;  b. ``B O O`` -> ``B I O``;  c. ``B O I`` -> ``B I I``;
    d. ``I B I`` -> ``I I I``.  At one position the first matching rule wins.
    With ``schema="WBIO"`` a ``B`` left without a following ``I`` becomes ``W``.
    """
    out = list(seq)
    while _fix_pass(out):
        pass
    if schema == "WBIO":
        for i, lab in enumerate(out):
            if lab == "B" and (i + 1 == len(out) or out[i + 1] != "I"):
                out[i] = "W"
    return out


def boundary_adjust(start: int, end: int, tokens, sent_start: int, sent_end: int,
                    pos_tags=DEFAULT_BOUNDARY_POS, chunk_tags=DEFAULT_BOUNDARY_CHUNKS) -> tuple[int, int]:
    """Grow a token span ``[start, end)`` over neighbouring noun-phrase material.

    A neighbour is absorbed when its POS and chunk tags are both allowed and
    it belongs to the same NP chunk (no crossing a ``B-NP``).  Never shrinks
    and never leaves the sentence.
    """
    def ok(k):
        return tokens[k].pos in pos_tags and tokens[k].chunk in chunk_tags

    while start > sent_start and ok(start - 1) and tokens[start].chunk == "I-NP":
        start -= 1
    while end < sent_end and ok(end) and tokens[end].chunk == "I-NP":
        end += 1
    return start, end


def fp_filter(mentions, text: str, cfg: PostprocessConfig) -> list:
    """Drop mentions whose whole lowercase surface is a known false positive."""
    kept = []
    for m in mentions:
        surface = text[m.span.start:m.span.end].lower()
        if len(surface) == 1 or surface in cfg.fp_lexicon:
            continue
        kept.append(m)
    return kept


def span_to_mention(id_, tokens, start, end, category) -> EventMention:
    return EventMention(id_, Span(tokens[start].start, tokens[end - 1].end), category)
