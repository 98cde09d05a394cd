"""Baseline POS tagger and NP chunker.

The tags only feed CRF features, so a lexicon + suffix-rule tagger is
enough.  Anything with a ``tag(tokens)`` method returning tokens with
``pos`` and ``chunk`` filled can stand in for :class:`BaselineTagger`.
"""
from __future__ import annotations

import re
from dataclasses import replace
from pathlib import Path
from typing import Protocol, Sequence

from ..errors import DataError
from .tokenize import Token

_LEXICON = {
    "DT": "the a an this that these those each every no any some all another either neither",
    "PRP$": "his her its their our my your",
    "PRP": "he she it they we i you him them us me himself herself themselves",
    "IN": ("of in on at for with by from after before during since until into onto over under "
           "about through throughout without within upon post prior due via per than because while "
           "although though if as"),
    "CC": "and or but nor plus",
    "TO": "to",
    "MD": "will would can could may might shall should must",
    "EX": "there",
    "WDT": "which whatever",
    "WP": "who whom what",
    "WRB": "when where why how",
    "RB": ("not also very then again later now today yesterday tomorrow tonight currently "
           "previously recently ago still never always often once twice daily nightly weekly "
           "monthly yearly approximately about soon prn"),
    "VBZ": ("is has does shows reveals reports denies notes demonstrates takes requires remains "
            "appears complains receives continues uses needs feels"),
    "VBP": "are have do",
    "VBD": ("was were had did showed revealed reported denied noted demonstrated received "
            "underwent developed presented complained became found started began took gave got "
            "went came felt saw ran made kept brought told"),
    "VBN": "been shown given seen taken done",
    "VB": "be have do take continue start give",
    "VBG": "being having",
    "JJ": ("severe mild moderate acute chronic new old left right bilateral large small "
           "normal abnormal positive negative stable significant recent prior other same "
           "high low elevated"),
    "NN": ("patient pain history day week month year morning evening afternoon night "
           "admission discharge course illness"),
    "CD": ("one two three four five six seven eight nine ten eleven twelve twenty thirty "
           "hundred several"),
}
LEXICON = {w: tag for tag, words in _LEXICON.items() for w in words.split()}

_SUFFIX_RULES = (
    (re.compile(r"(ing)$"), "VBG"),
    (re.compile(r"(ly)$"), "RB"),
    (re.compile(r"(ous|ive|ful|less|able|ible|ic|ical|ary|al|ant|ent)$"), "JJ"),
    (re.compile(r"(tion|sion|ment|ness|ity|ism|ist|ure|ance|ence|itis|osis|emia|ectomy|otomy|scopy|gram|graphy)$"), "NN"),
    (re.compile(r"(ed)$"), "VBD"),
    (re.compile(r"[^s]s$"), "NNS"),
)
_PUNCT_TAGS = {".": ".", "!": ".", "?": ".", ",": ",", ":": ":", ";": ":", "(": "(", ")": ")",
               "\"": "''", "'": "''", "-": ":", "/": "SYM", "#": "#", "$": "$", "%": "NN"}

NP_TAGS = frozenset({"DT", "PRP$", "CD", "JJ", "JJR", "JJS", "NN", "NNS", "NNP", "NNPS"})
_NP_HEAD_START = frozenset({"DT", "PRP$"})
_VP_TAGS = frozenset({"MD", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "RB", "TO"})


def pos_tag_word(text: str, sentence_initial: bool) -> str:
    low = text.lower()
    if low in LEXICON:
        return LEXICON[low]
    if re.fullmatch(r"[\d.,/:-]+", text) and any(c.isdigit() for c in text):
        return "CD"
    if text in _PUNCT_TAGS:
        return _PUNCT_TAGS[text]
    if not any(c.isalnum() for c in text):
        return "SYM"
    if text[0].isupper() and not sentence_initial and not text.isupper():
        return "NNP"
    for pattern, tag in _SUFFIX_RULES:
        if pattern.search(low):
            return tag
    return "NN"


def chunk_tags(pos_tags: Sequence[str]) -> list[str]:
    """Regex-style chunker: NP runs over NP_TAGS, a DT/PRP$ only opens one."""
    chunks = []
    prev = None  # phrase type of the previous token
    for i, tag in enumerate(pos_tags):
        if tag in NP_TAGS:
            if prev == "NP" and tag not in _NP_HEAD_START:
                chunks.append("I-NP")
            else:
                chunks.append("B-NP")
            prev = "NP"
        elif tag in _VP_TAGS:
            chunks.append("I-VP" if prev == "VP" else "B-VP")
            prev = "VP"
        elif tag in ("IN", "TO"):
            chunks.append("B-PP")
            prev = "PP"
        else:
            chunks.append("O")
            prev = None
    return chunks


class Tagger(Protocol):
    def tag(self, tokens: Sequence[Token]) -> list[Token]: ...


class BaselineTagger:
    def tag(self, tokens: Sequence[Token]) -> list[Token]:
        pos = [pos_tag_word(t.text, i == 0) for i, t in enumerate(tokens)]
        chunks = chunk_tags(pos)
        return [replace(t, pos=p, chunk=c) for t, p, c in zip(tokens, pos, chunks)]


class PretaggedTagger:
    """Tags from an external file: one ``text<TAB>pos<TAB>chunk`` line per token.

    Token texts must line up with the tokenizer output, in document order;
    :meth:`tag` consumes the rows sequentially.
    """

    def __init__(self, rows):
        self.rows = list(rows)
        self.cursor = 0

    @classmethod
    def from_file(cls, path):
        rows = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected text<TAB>pos<TAB>chunk")
            rows.append(tuple(parts))
        return cls(rows)

    def tag(self, tokens: Sequence[Token]) -> list[Token]:
        out = []
        for t in tokens:
            if self.cursor >= len(self.rows):
                raise DataError(f"pre-tagged input ran out at token {t.text!r}")
            text, pos, chunk = self.rows[self.cursor]
            if text != t.text:
                raise DataError(f"pre-tagged token {text!r} does not match {t.text!r}")
            out.append(replace(t, pos=pos, chunk=chunk))
            self.cursor += 1
        return out
