"""Trigger/scope negation detection in the style of ConText."""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from ..preproc.tokenize import tokenize

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
DIRECTIONS = ("Forward", "Backward", "Bidirectional")


@dataclass(frozen=True)
class NegationRule:
    trigger: tuple  # lowercase token texts
    direction: str = "Forward"
    scope_limit: int = 6

    def __post_init__(self):
        if not self.trigger:
            raise ValueError("negation trigger must be non-empty")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.scope_limit <= 0:
            raise ValueError("scope limit must be positive")


@dataclass(frozen=True)
class NegationLexicon:
    rules: tuple
    terminators: frozenset

    @classmethod
    def load(cls, triggers_path=DATA_DIR / "negation_triggers.tsv",
             terminators_path=DATA_DIR / "negation_terminators.txt") -> "NegationLexicon":
        rules = []
        for line in Path(triggers_path).read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            trig, direction, limit = line.split("\t")
            words = tuple(t.text.lower() for t in tokenize(trig))
            rules.append(NegationRule(words, direction.strip(), int(limit)))
        terms = Path(terminators_path).read_text(encoding="utf-8").splitlines()
        return cls(tuple(rules), frozenset(t.strip().lower() for t in terms if t.strip() and not t.startswith("#")))


def _trigger_matches(words, rules):
    """Longest trigger at each position; positions inside a match are skipped."""
    found = []
    i = 0
    while i < len(words):
        best = None
        for r in rules:
            n = len(r.trigger)
            if tuple(words[i:i + n]) == r.trigger and (best is None or n > len(best.trigger)):
                best = r
        if best:
            found.append((i, i + len(best.trigger), best))
            i += len(best.trigger)
        else:
            i += 1
    return found


def negation_scopes(words, lexicon: NegationLexicon) -> list[tuple[int, int]]:
    """Token ranges ``[a, b)`` covered by some trigger's scope."""
    scopes = []
    for start, end, rule in _trigger_matches(words, lexicon.rules):
        if rule.direction in ("Forward", "Bidirectional"):
            k = end
            while k < len(words) and k - end < rule.scope_limit and words[k] not in lexicon.terminators:
                k += 1
            if k > end:
                scopes.append((end, k))
        if rule.direction in ("Backward", "Bidirectional"):
            k = start
            while k > 0 and start - k < rule.scope_limit and words[k - 1] not in lexicon.terminators:
                k -= 1
            if k < start:
                scopes.append((k, start))
    return scopes


def detect_negation(mentions, tokens, lexicon: NegationLexicon) -> list:
    """Mark mentions negated when their first token falls in a trigger scope.

    ``tokens`` are the tokens of one sentence; mentions outside it are
    returned unchanged.
    """
    if not tokens:
        return list(mentions)
    words = [t.text.lower() for t in tokens]
    scopes = negation_scopes(words, lexicon)
    out = []
    for m in mentions:
        first = next((i for i, t in enumerate(tokens) if t.end > m.span.start and t.start < m.span.end), None)
        if first is None:
            out.append(m)
            continue
        neg = any(a <= first < b for a, b in scopes)
        out.append(replace(m, negated=neg))
    return out
