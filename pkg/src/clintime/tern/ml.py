"""CRF-based temporal expression recognition over the TER feature matrix (IO labels)."""
from __future__ import annotations

from ..corpus import Span, TimexMention
from ..crf import TER_TEMPLATE_TEXT, decode_labels, encode_labels, parse_templates, ter_matrix, train
from ..errors import OverlappingMentions


def recognize_ml(tokens, sentences, model) -> list[TimexMention]:
    found = []
    for sent in sentences:
        toks = tokens[sent.token_start:sent.token_end]
        if not toks:
            continue
        labels = model.decode(ter_matrix(toks))
        for s, e in decode_labels(labels, toks, model.schema):
            found.append(TimexMention("", Span(toks[s].start, toks[e - 1].end)))
    return found


def ter_examples(tokens, sentences, timexes) -> list[tuple]:
    """(feature matrix, IO labels) per sentence; sentences that IO cannot encode are skipped."""
    out = []
    for sent in sentences:
        toks = tokens[sent.token_start:sent.token_end]
        if not toks:
            continue
        inside = [t for t in timexes if sent.span.start <= t.span.start < sent.span.end]
        try:
            labels = encode_labels(inside, toks, "IO")
        except OverlappingMentions:
            continue
        out.append((ter_matrix(toks), labels))
    return out


def train_ter(examples, hyper=None, max_iter=200, seed=0):
    return train(examples, "IO", parse_templates(TER_TEMPLATE_TEXT), hyper=hyper, max_iter=max_iter, seed=seed)
