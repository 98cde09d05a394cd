from __future__ import annotations

from dataclasses import replace

from .gazetteer import CATEGORIES, Gazetteer, dictionary_feature
from .stem import stem
from .tagger import BaselineTagger, PretaggedTagger, Tagger
from .tokenize import Sentence, Token, split_sentences, token_case, token_kind, tokenize

__all__ = [
    "CATEGORIES", "Gazetteer", "dictionary_feature", "stem", "BaselineTagger",
    "PretaggedTagger", "Tagger", "Sentence", "Token", "split_sentences",
    "token_case", "token_kind", "tokenize", "preprocess",
]


def preprocess(text: str, gazetteer: Gazetteer | None = None, tagger: Tagger | None = None):
    """Tokenize, split, stem, POS/chunk tag and gazetteer-tag ``text``.

    Returns ``(tokens, sentences)``; tagging runs sentence by sentence.
    """
    tagger = tagger or BaselineTagger()
    tokens = [replace(t, stem=stem(t.text)) for t in tokenize(text)]
    sentences = split_sentences(text, tokens)
    out = []
    for s in sentences:
        chunk = tagger.tag(tokens[s.token_start:s.token_end])
        if gazetteer is not None:
            chunk = gazetteer.tag(chunk)
        out.extend(chunk)
    return out, sentences
