"""IO / BIO / W-BIO label codecs for one entity type."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import InvalidGoldLabel, OverlappingMentions

SCHEMA_LABELS = {
    "IO": ("I", "O"),
    "BIO": ("B", "I", "O"),
    "WBIO": ("B", "I", "O", "W"),
}


@dataclass(frozen=True)
class LabelSchema:
    kind: str
    entity_label: str = "ENTITY"

    def __post_init__(self):
        if self.kind not in SCHEMA_LABELS:
            raise ValueError(f"unknown schema {self.kind!r}; expected IO, BIO or WBIO")

    @property
    def labels(self) -> tuple:
        return SCHEMA_LABELS[self.kind]


def allowed_transitions(kind: str):
    """(prev, next) label pairs permitted by a schema; ``None`` marks the edges."""
    labels = SCHEMA_LABELS[kind] + (None,)
    ok = set()
    for a in labels:
        for b in labels:
            if a is None and b is None:
                continue
            if kind == "BIO" and b == "I" and a not in ("B", "I"):
                continue
            if kind == "WBIO":
                if b == "I" and a not in ("B", "I"):
                    continue
                if a == "B" and b != "I":
                    continue
            ok.add((a, b))
    return ok


def is_valid(seq: Sequence[str], kind: str) -> bool:
    ok = allowed_transitions(kind)
    labels = set(SCHEMA_LABELS[kind])
    if any(lab not in labels for lab in seq):
        return False
    path = [None, *seq, None]
    if not seq:
        return True
    return all((a, b) in ok for a, b in zip(path, path[1:]))


def token_spans(mentions, tokens):
    """Map character-span mentions onto (first_token, last_token_exclusive)."""
    out = []
    for m in mentions:
        idx = [i for i, t in enumerate(tokens) if t.span.start < m.span.end and m.span.start < t.span.end]
        if idx:
            out.append((idx[0], idx[-1] + 1))
    return out


def encode_labels(mentions, tokens, schema: LabelSchema | str) -> list[str]:
    kind = schema.kind if isinstance(schema, LabelSchema) else schema
    spans = sorted(token_spans(mentions, tokens))
    labels = ["O"] * len(tokens)
    for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
        if s2 < e1:
            raise OverlappingMentions(f"mentions over tokens [{s1},{e1}) and [{s2},{e2}) overlap")
    for s, e in spans:
        for k in range(s, e):
            labels[k] = "I"
        if kind == "BIO":
            labels[s] = "B"
        elif kind == "WBIO":
            labels[s] = "W" if e - s == 1 else "B"
    if kind == "IO":
        # adjacent mentions are indistinguishable in IO
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            if e1 == s2:
                raise OverlappingMentions(f"adjacent mentions at token {s2} cannot be encoded in IO")
    return labels


def decode_labels(seq: Sequence[str], tokens=None, schema: LabelSchema | str = "BIO") -> list[tuple[int, int]]:
    """Token-index spans ``[start, end)`` of the mentions a label sequence encodes.

    No repair: B and W always open a new mention, I continues an open one
    (or opens one when nothing is open), O closes.
    """
    spans = []
    start = None
    for i, lab in enumerate(seq):
        if lab == "O":
            if start is not None:
                spans.append((start, i))
            start = None
        elif lab == "W":
            if start is not None:
                spans.append((start, i))
            spans.append((i, i + 1))
            start = None
        elif lab == "B":
            if start is not None:
                spans.append((start, i))
            start = i
        elif lab == "I":
            if start is None:
                start = i
        else:
            raise InvalidGoldLabel(f"unknown label {lab!r}")
    if start is not None:
        spans.append((start, len(seq)))
    return spans


def check_gold(seq: Sequence[str], kind: str) -> None:
    if not is_valid(seq, kind):
        raise InvalidGoldLabel(f"sequence {' '.join(seq)} is not valid under {kind}")
