"""Temporal gazetteers: one ``lexicons/<Category>.txt`` file per category."""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Sequence

from ..errors import GazetteerLoadError
from .tokenize import Token, tokenize

CATEGORIES = (
    "ClinicalFrequency", "Duration", "Festival", "Season", "Weekday",
    "Month", "LiteralTime", "TemporalModifier", "OrdinalNumber", "LiteralNumber",
)

DEFAULT_DIR = Path(__file__).resolve().parent.parent / "data" / "lexicons"


class Gazetteer:
    """Case-insensitive multi-token lexicon per category.

    Entries are stored as a token trie per category.  Every token covered by
    the longest entry starting at any position is tagged, so adding an entry
    can only add tags.
    """

    def __init__(self, entries: dict[str, list[str]]):
        self.entries = {cat: sorted(set(entries.get(cat, ()))) for cat in CATEGORIES}
        self._tries = {}
        for cat, words in self.entries.items():
            trie: dict = {}
            for entry in words:
                node = trie
                for tok in tokenize(entry):
                    node = node.setdefault(tok.text.lower(), {})
                node[None] = True
            self._tries[cat] = trie

    @classmethod
    def load(cls, directory=DEFAULT_DIR) -> "Gazetteer":
        directory = Path(directory)
        entries = {}
        for cat in CATEGORIES:
            path = directory / f"{cat}.txt"
            try:
                lines = path.read_text(encoding="utf-8").splitlines()
            except (OSError, UnicodeDecodeError) as exc:
                raise GazetteerLoadError(path, str(exc)) from exc
            entries[cat] = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
        return cls(entries)

    def with_entry(self, category: str, entry: str) -> "Gazetteer":
        entries = {c: list(v) for c, v in self.entries.items()}
        entries[category].append(entry)
        return Gazetteer(entries)

    def _longest(self, trie, words, start):
        node, best = trie, 0
        for j in range(start, len(words)):
            node = node.get(words[j])
            if node is None:
                break
            if None in node:
                best = j + 1 - start
        return best

    def matches(self, tokens: Sequence[Token]):
        """Yield (category, start_index, end_index) of the longest match per start."""
        words = [t.text.lower() for t in tokens]
        for cat in CATEGORIES:
            trie = self._tries[cat]
            for i in range(len(words)):
                n = self._longest(trie, words, i)
                if n:
                    yield cat, i, i + n

    def tag(self, tokens: Sequence[Token]) -> list[Token]:
        tags = [set(t.gazetteer_tags) for t in tokens]
        for cat, i, j in self.matches(tokens):
            for k in range(i, j):
                tags[k].add(cat)
        return [replace(t, gazetteer_tags=frozenset(tg)) for t, tg in zip(tokens, tags)]


def dictionary_feature(token: Token) -> str:
    """Gazetteer column value used by the TER feature templates."""
    return "|".join(sorted(token.gazetteer_tags)) if token.gazetteer_tags else "O"
