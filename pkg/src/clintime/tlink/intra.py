"""Intra-sentence TLINK rules over adjacent anchor pairs."""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..corpus import EVENT_CATEGORIES, RELATIONS, TIMEX_TYPES
from ..errors import RuleCompileError

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
KINDS = ("Coordinate", "Prepositional", "Other")
_GROUPS = {"EVENT": set(EVENT_CATEGORIES), "TIMEX": set(TIMEX_TYPES),
           "*": set(EVENT_CATEGORIES) | set(TIMEX_TYPES)}


@dataclass(frozen=True)
class IntraRule:
    id: str
    kind: str
    left: frozenset
    connector: re.Pattern
    right: frozenset
    relation: str
    direction: str  # "LR" or "RL"
    max_dist: int
    max_intervening_anchors: int = 0

    def applies(self, left_type: str, between: str, right_type: str, dist: int) -> bool:
        return (left_type in self.left and right_type in self.right and dist <= self.max_dist
                and self.connector.fullmatch(between) is not None)


def _types(rule_id, name):
    key = name.strip()
    if key.upper() in _GROUPS:
        return frozenset(_GROUPS[key.upper()])
    for t in (*EVENT_CATEGORIES, *TIMEX_TYPES):
        if t.lower() == key.lower():
            return frozenset({t})
    raise RuleCompileError(rule_id, f"unknown anchor type {name!r}")


def parse_intra_rules(text: str) -> tuple[IntraRule, ...]:
    rules, seen = [], set()
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        f = line.split("\t")
        if len(f) != 8:
            raise RuleCompileError(f[0], f"expected 8 tab-separated fields, got {len(f)}")
        rid, kind, left, conn, right, rel, direction, dist = f
        if rid in seen:
            raise RuleCompileError(rid, "duplicate rule id")
        seen.add(rid)
        if kind not in KINDS:
            raise RuleCompileError(rid, f"unknown kind {kind!r}")
        if rel not in RELATIONS:
            raise RuleCompileError(rid, f"unknown relation {rel!r}")
        if direction not in ("LR", "RL"):
            raise RuleCompileError(rid, f"direction must be LR or RL, got {direction!r}")
        if not conn:
            raise RuleCompileError(rid, "empty connector")
        try:
            regex = re.compile(conn)
            max_dist = int(dist)
        except (re.error, ValueError) as exc:
            raise RuleCompileError(rid, str(exc)) from exc
        if max_dist <= 0:
            raise RuleCompileError(rid, "maxDist must be positive")
        rules.append(IntraRule(rid, kind, _types(rid, left), regex, _types(rid, right), rel, direction, max_dist))
    rules.sort(key=lambda r: KINDS.index(r.kind))  # stable: file order within a kind
    return tuple(rules)


def load_intra_rules(path=DATA_DIR / "intra_rules.tsv") -> tuple[IntraRule, ...]:
    return parse_intra_rules(Path(path).read_text(encoding="utf-8"))


def anchor_type(m) -> str:
    return getattr(m, "category", None) or m.ttype


def extract_intra(tokens, sentence, anchors, rules) -> list[tuple]:
    """``(source_id, target_id, relation, kind)`` for adjacent anchors in one sentence.

    ``anchors`` may hold events and timexes of the whole document; only those
    starting inside the sentence take part.
    """
    inside = sorted((a for a in anchors if sentence.span.start <= a.span.start < sentence.span.end),
                    key=lambda a: (a.span.start, a.span.end, a.id))
    toks = tokens[sentence.token_start:sentence.token_end]
    out = []
    for left, right in zip(inside, inside[1:]):
        if left.span.end > right.span.start:
            continue
        between = [t.text.lower() for t in toks if t.start >= left.span.end and t.end <= right.span.start]
        text = " ".join(between)
        lt, rt = anchor_type(left), anchor_type(right)
        for rule in rules:
            if rule.applies(lt, text, rt, len(between)):
                src, tgt = (left, right) if rule.direction == "LR" else (right, left)
                out.append((src.id, tgt.id, rule.relation, rule.kind))
                break
    return out
