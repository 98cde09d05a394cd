"""Token-pattern rule engine for temporal expressions."""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..corpus import TIMEX_TYPES, Span, TimexMention
from ..errors import RuleCompileError
from ..preproc.gazetteer import CATEGORIES
from ..preproc.tokenize import KINDS

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
DEFAULT_RULES = DATA_DIR / "ter_rules.tsv"
QUANTIFIERS = ("?", "+", "*")


@dataclass(frozen=True)
class Matcher:
    kind: str  # "re", "gaz" or "kind"
    value: str
    quant: str = ""  # "", "?", "+", "*"
    regex: re.Pattern | None = None

    def test(self, token) -> bool:
        if self.kind == "re":
            return self.regex.fullmatch(token.text) is not None
        if self.kind == "gaz":
            return self.value in token.gazetteer_tags
        return token.kind == self.value


@dataclass(frozen=True)
class TerRule:
    id: str
    priority: int
    ttype: str | None
    pattern: tuple

    def ends(self, tokens, i: int, limit: int) -> set[int]:
        """All token indices ``j`` such that the pattern matches ``tokens[i:j]``."""
        states = {i}
        for m in self.pattern:
            nxt = set()
            for k in states:
                if m.quant in ("?", "*"):
                    nxt.add(k)
                if m.quant in ("+", "*"):
                    j = k
                    while j < limit and m.test(tokens[j]):
                        j += 1
                        nxt.add(j)
                elif k < limit and m.test(tokens[k]):
                    nxt.add(k + 1)
            states = nxt
            if not states:
                break
        return {j for j in states if j > i}


def compile_matcher(rule_id: str, item: str) -> Matcher:
    quant = ""
    if item[:1] in QUANTIFIERS:
        quant, item = item[0], item[1:]
    kind, sep, value = item.partition(":")
    if not sep or not value:
        raise RuleCompileError(rule_id, f"malformed matcher {item!r}")
    if kind == "re":
        try:
            return Matcher("re", value, quant, re.compile(value, re.IGNORECASE))
        except re.error as exc:
            raise RuleCompileError(rule_id, f"bad regex {value!r}: {exc}") from exc
    if kind == "gaz":
        if value not in CATEGORIES:
            raise RuleCompileError(rule_id, f"unknown gazetteer category {value!r}")
        return Matcher("gaz", value, quant)
    if kind == "kind":
        if value not in KINDS:
            raise RuleCompileError(rule_id, f"unknown token kind {value!r}")
        return Matcher("kind", value, quant)
    raise RuleCompileError(rule_id, f"unknown matcher type {kind!r}")


def parse_rules(text: str) -> tuple[TerRule, ...]:
    rules, seen = [], set()
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise RuleCompileError(fields[0], f"expected 4 tab-separated fields, got {len(fields)}")
        rule_id, priority, ttype, pattern = (f.strip() for f in fields)
        if rule_id in seen:
            raise RuleCompileError(rule_id, "duplicate rule id")
        seen.add(rule_id)
        try:
            prio = int(priority)
        except ValueError:
            raise RuleCompileError(rule_id, f"priority {priority!r} is not an integer") from None
        if ttype in ("", "-"):
            ttype = None
        elif ttype not in TIMEX_TYPES:
            raise RuleCompileError(rule_id, f"unknown type {ttype!r}")
        matchers = tuple(compile_matcher(rule_id, m) for m in pattern.split())
        if not matchers:
            raise RuleCompileError(rule_id, "empty pattern")
        if all(m.quant in ("?", "*") for m in matchers):
            raise RuleCompileError(rule_id, "pattern can match the empty sequence")
        rules.append(TerRule(rule_id, prio, ttype, matchers))
    return tuple(rules)


def load_rules(path=DEFAULT_RULES) -> tuple[TerRule, ...]:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


def _candidates(tokens, rules, lo, hi):
    """Longest match per start position; ties go to the higher priority."""
    found = []
    for i in range(lo, hi):
        best = None
        for order, rule in enumerate(rules):
            ends = rule.ends(tokens, i, hi)
            if not ends:
                continue
            key = (max(ends), rule.priority, -order)
            if best is None or key > best[0]:
                best = (key, rule)
        if best:
            (end, _, _), rule = best
            found.append((i, end, rule))
    return found


def recognize_rules(tokens, rules, sentences=None) -> list[TimexMention]:
    """Rule-based mentions with ``ttype`` set from the rule and no value.

    Matches never cross sentence boundaries when ``sentences`` is given.
    Overlaps are resolved by priority, then length, then earliest start.
    """
    bounds = [(s.token_start, s.token_end) for s in sentences] if sentences else [(0, len(tokens))]
    cands = []
    for lo, hi in bounds:
        cands.extend(_candidates(tokens, rules, lo, hi))
    cands.sort(key=lambda c: (-c[2].priority, -(c[1] - c[0]), c[0]))
    taken = [False] * len(tokens)
    chosen = []
    for i, j, rule in cands:
        if any(taken[i:j]):
            continue
        for k in range(i, j):
            taken[k] = True
        chosen.append((i, j, rule))
    chosen.sort()
    return [TimexMention("", Span(tokens[i].start, tokens[j - 1].end), rule.ttype) for i, j, rule in chosen]


def matching_rules(tokens, rules) -> list[str]:
    """Ids of rules matching the whole token sequence (useful for auditing)."""
    return [r.id for r in rules if len(tokens) in {j for j in r.ends(tokens, 0, len(tokens))}]
