import random

import pytest
from hypothesis import given, strategies as st

from clintime.corpus import EventMention, Span
from clintime.crf import is_valid
from clintime.events import NegationLexicon, PostprocessConfig, boundary_adjust, detect_negation, fp_filter, label_fix
from clintime.preproc import preprocess

TABLE = [
    ("O O O I I I I", "O O B I I I I"),
    ("O O O B O O O", "O O O B I O O"),
    ("O O O B O I I", "O O O B I I I"),
    ("O O O B I I B I I", "O O O B I I I I I"),
]


@pytest.mark.parametrize("raw, fixed", TABLE)
def test_fixer_rows(raw, fixed):
    assert label_fix(raw.split()) == fixed.split()


def test_fixer_leaves_clean_sequences():
    for seq in ("O B I O", "B O B", "O O O", ""):
        assert label_fix(seq.split()) == seq.split()


def test_w_before_i_opens_a_mention():
    assert label_fix("W I O".split(), "WBIO") == "B I O".split()
    assert label_fix("O B O".split(), "WBIO") == "O W O".split()


@given(st.lists(st.sampled_from("WBIO"), max_size=12), st.sampled_from(["BIO", "WBIO"]))
def test_fixer_output_is_schema_valid_and_stable(seq, schema):
    if schema == "BIO":
        seq = [s for s in seq if s != "W"]
    once = label_fix(seq, schema)
    assert label_fix(once, schema) == once
    assert is_valid(once, schema)


def test_fixer_idempotence_random():
    rng = random.Random(0)
    for _ in range(2000):
        seq = [rng.choice("BIO") for _ in range(rng.randint(0, 15))]
        once = label_fix(seq)
        assert label_fix(once) == once


def _span(tokens, s, e):
    return tokens[s].start, tokens[e - 1].end


def test_boundary_grows_over_noun_phrase():
    text = "She has severe stomach ache today."
    tokens, _ = preprocess(text)
    s, e = boundary_adjust(4, 5, tokens, 0, len(tokens))
    a, b = _span(tokens, s, e)
    assert text[a:b] == "severe stomach ache"
    assert boundary_adjust(s, e, tokens, 0, len(tokens)) == (s, e)


def test_boundary_stays_in_sentence_and_never_shrinks():
    tokens, _ = preprocess("Chest pain resolved.")
    assert boundary_adjust(0, 1, tokens, 0, len(tokens)) == (0, 2)
    assert boundary_adjust(0, 2, tokens, 0, len(tokens)) == (0, 2)
    assert boundary_adjust(1, 2, tokens, 1, len(tokens)) == (1, 2)


def test_fp_filter():
    text = "the a he chest pain"
    ms = [EventMention("", Span(0, 3), "Problem"), EventMention("", Span(4, 5), "Problem"),
          EventMention("", Span(6, 8), "Problem"), EventMention("", Span(9, 19), "Problem")]
    kept = fp_filter(ms, text, PostprocessConfig())
    assert [text[m.span.start:m.span.end] for m in kept] == ["chest pain"]


@pytest.mark.parametrize("text, surface, negated", [
    ("She denies chest pain.", "chest pain", True),
    ("No fever or chills.", "chills", True),
    ("Chest pain but no fever.", "Chest pain", False),
    ("Chest pain but no fever.", "fever", True),
    ("The cough has resolved.", "cough", True),
    ("Patient reports nausea.", "nausea", False),
])
def test_negation(text, surface, negated):
    tokens, _ = preprocess(text)
    start = text.index(surface)
    m = EventMention("E1", Span(start, start + len(surface)), "Problem")
    (out,) = detect_negation([m], tokens, NegationLexicon.load())
    assert out.negated is negated
