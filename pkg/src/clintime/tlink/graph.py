"""Temporal graphs over Before/Overlap facts: closure, conflicts and reduction.

A fact is ``(x, y, "Before")`` or ``(x, y, "Overlap")`` with ``x < y`` for
Overlap.  ``After(x, y)`` is stored as ``Before(y, x)``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

BEFORE, AFTER, OVERLAP = "Before", "After", "Overlap"


def fact(source: str, target: str, relation: str) -> tuple:
    if relation == AFTER:
        return (target, source, BEFORE)
    if relation == OVERLAP:
        a, b = sorted((source, target))
        return (a, b, OVERLAP)
    if relation == BEFORE:
        return (source, target, BEFORE)
    raise ValueError(f"unknown relation {relation!r}")


def pair(f) -> frozenset:
    return frozenset(f[:2])


def _classes(nodes, facts):
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, rel in facts:
        if rel == OVERLAP:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    members = defaultdict(list)
    for n in nodes:
        members[find(n)].append(n)
    return find, members


def closure_facts(facts) -> set:
    """Unconstrained fixpoint, Before self-loops included; Overlap self-loops never."""
    facts = set(facts)
    nodes = {x for f in facts for x in f[:2]}
    find, members = _classes(nodes, facts)
    succ = defaultdict(set)
    for a, b, rel in facts:
        if rel == BEFORE:
            succ[find(a)].add(find(b))
    out = set()
    for root, group in members.items():
        for i, x in enumerate(group):
            for y in group[i + 1:]:
                out.add(fact(x, y, OVERLAP))
        seen, stack = set(), list(succ[root])
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            stack.extend(succ[c])
        for c in seen:
            for x in group:
                for y in members[c]:
                    out.add((x, y, BEFORE))
    return out


def conflicts_of(facts) -> set:
    """Pairs (as frozensets) carrying more than one relation, plus Before self-loops."""
    rels = defaultdict(set)
    bad = set()
    for f in facts:
        if f[0] == f[1]:
            bad.add(frozenset((f[0],)))
            continue
        rels[pair(f)].add(f)
    bad.update(p for p, fs in rels.items() if len(fs) > 1)
    return bad


@dataclass(frozen=True)
class ClosureResult:
    facts: frozenset
    derived: frozenset
    conflicts: frozenset = field(default_factory=frozenset)


def transitive_closure(facts) -> ClosureResult:
    """Input facts plus every derived fact whose pair is conflict-free.

    Conflicting pairs (e.g. both Before and After inferred) are reported and
    no derived fact is added for them; input facts are always kept.
    """
    given = frozenset(facts)
    full = closure_facts(given)
    bad = conflicts_of(full)
    derived = frozenset(f for f in full - given if f[0] != f[1] and pair(f) not in bad)
    return ClosureResult(given | derived, derived, frozenset(bad))


def consistent_subset(facts) -> tuple[frozenset, frozenset]:
    """Drop every input fact whose pair conflicts in the closure; returns (kept, dropped)."""
    facts = frozenset(facts)
    bad = conflicts_of(closure_facts(facts))
    dropped = frozenset(f for f in facts if pair(f) in bad or frozenset((f[0],)) in bad or f[0] == f[1])
    return facts - dropped, dropped


def reduce(facts) -> frozenset:
    """Greedy removal of edges implied by the others, in canonical order, until stable."""
    cur = set(facts)
    changed = True
    while changed:
        changed = False
        for f in sorted(cur):
            rest = cur - {f}
            if f in closure_facts(rest):
                cur = rest
                changed = True
    return frozenset(cur)


@dataclass(frozen=True)
class TemporalGraph:
    nodes: frozenset
    facts: frozenset

    @classmethod
    def from_links(cls, links) -> "TemporalGraph":
        facts = frozenset(fact(l.source, l.target, l.relation) for l in links if l.source != l.target)
        nodes = frozenset(x for l in links for x in (l.source, l.target))
        return cls(nodes, facts)

    def closure(self) -> ClosureResult:
        return transitive_closure(self.facts)
