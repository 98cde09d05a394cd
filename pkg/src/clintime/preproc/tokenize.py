"""Offset-faithful tokenizer and sentence splitter."""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from ..corpus import Span

KINDS = ("Word", "Number", "Symbol", "Punctuation")
CASES = ("LowerCase", "UpperCase", "UpperInitial", "MixedCaps", "AllCaps")

# Dotted abbreviations kept whole; clinical frequency forms come first.
ABBREVIATIONS = (
    "q.i.d.", "t.i.d.", "b.i.d.", "q.h.s.", "q.o.d.", "p.r.n.", "q.a.m.", "q.p.m.",
    "q.d.", "p.o.", "a.m.", "p.m.", "e.g.", "i.e.", "etc.", "vs.", "approx.",
    "dr.", "mr.", "mrs.", "ms.", "st.", "pt.", "no.",
)
# no sentence break is allowed right after these
TITLES = frozenset({"dr.", "mr.", "mrs.", "ms.", "st.", "pt.", "no.", "vs.", "e.g.", "i.e.", "approx."})

_abbrev = "|".join(re.escape(a) for a in sorted(ABBREVIATIONS, key=len, reverse=True))
_TOKEN_RE = re.compile(
    rf"""
    (?<![\w.])(?:{_abbrev})(?!\w)                  # protected abbreviation
  | \d{{1,4}}/\d{{1,2}}(?:/\d{{2,4}})?(?![\d/])     # slash dates and ratios
  | \d{{1,2}}:\d{{2}}(?::\d{{2}})?(?!\d)             # clock times
  | \d+(?:-\d+)+(?![\d-])                          # hyphenated digit runs (phone numbers)
  | \d+\.\d+                                       # decimals
  | \d+(?:st|nd|rd|th)(?![^\W\d_])                 # ordinals such as 4th
  | \d+                                            # integers
  | q\d+(?:h|hr|hrs)(?![^\W\d_])                   # q4h style frequencies
  | [^\W\d_]+(?:['’-][^\W\d_]+)*                   # words, incl. hyphenated
  | \S                                             # anything else, one char
    """,
    re.VERBOSE | re.IGNORECASE,
)
_NUMBER_RE = re.compile(r"^\d+(?:[./:,-]\d+)*$")


@dataclass(frozen=True)
class Token:
    span: Span
    text: str
    kind: str
    case: str
    stem: str = ""
    pos: str = ""
    chunk: str = ""
    gazetteer_tags: frozenset = frozenset()

    @property
    def start(self):
        return self.span.start

    @property
    def end(self):
        return self.span.end


@dataclass(frozen=True)
class Sentence:
    span: Span
    token_start: int
    token_end: int  # exclusive index into the document token list

    @property
    def token_range(self) -> range:
        return range(self.token_start, self.token_end)


def token_kind(text: str) -> str:
    if _NUMBER_RE.match(text):
        return "Number"
    if any(c.isalpha() for c in text):
        return "Word"
    if all(unicodedata.category(c).startswith("P") for c in text):
        return "Punctuation"
    return "Symbol"


def token_case(text: str) -> str:
    letters = [c for c in text if c.isalpha() and (c.isupper() or c.islower())]
    if not letters or all(c.islower() for c in letters):
        return "LowerCase"
    if all(c.isupper() for c in letters):
        return "UpperCase" if len(letters) == 1 else "AllCaps"
    if letters[0].isupper() and all(c.islower() for c in letters[1:]):
        return "UpperInitial"
    return "MixedCaps"


def tokenize(text: str) -> list[Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        s = m.group()
        if s.isspace():
            continue
        tokens.append(Token(Span(m.start(), m.end()), s, token_kind(s), token_case(s)))
    return tokens


def split_sentences(text: str, tokens: list[Token]) -> list[Sentence]:
    """Break after . ! ? when followed by a newline or whitespace plus a capital.

    Blank lines always end a sentence.  Never breaks after a title-like
    abbreviation such as ``Dr.``.
    """
    sentences = []
    first = 0
    for i, tok in enumerate(tokens):
        last = i + 1 == len(tokens)
        if not last:
            gap = text[tok.end:tokens[i + 1].start]
            nxt = tokens[i + 1].text
            low = tok.text.lower()
            final = tok.text in (".", "!", "?") or (low.endswith(".") and low in ABBREVIATIONS and low not in TITLES)
            boundary = "\n\n" in gap.replace("\r", "") or (
                final and ("\n" in gap or (gap and (nxt[0].isupper() or nxt[0].isdigit())))
            )
        if last or boundary:
            sentences.append(Sentence(Span(tokens[first].start, tok.end), first, i + 1))
            first = i + 1
    return sentences
