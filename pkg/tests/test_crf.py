import itertools

import numpy as np
import pytest
from scipy.special import logsumexp

from clintime.crf import (
    CrfModel, EVENT_TEMPLATE_TEXT, TER_TEMPLATE_TEXT, decode_labels, encode_labels, expand_features,
    is_valid, log_partition, parse_templates, path_score, prepare, ter_matrix, train, viterbi,
)
from clintime.crf.model import objective
from clintime.corpus import EventMention, Span
from clintime.errors import ColumnOutOfRange, EmptyCorpus, InvalidGoldLabel, TemplateSyntaxError
from clintime.preproc import Gazetteer, preprocess

TEMPLATES = parse_templates("U00:%x[-1,1]\nU01:%x[0,1]\nU02:%x[1,1]\nU03:%x[0,1]/%x[0,2]")


def random_sentences(rng, n_sent, n_tok, vocab=6, labels="BIO"):
    out = []
    for _ in range(n_sent):
        words = [f"w{rng.integers(vocab)}" for _ in range(n_tok)]
        matrix = [[str(i), w, w[-1]] for i, w in enumerate(words)]
        seq = ["O"] * n_tok
        for i in range(n_tok):
            if rng.random() < 0.4:
                seq[i] = "B" if i == 0 or seq[i - 1] == "O" or rng.random() < 0.5 else "I"
        out.append((matrix, seq))
    return out


# --- templates ---------------------------------------------------------------

def test_parse_single_and_combined():
    (u02,) = parse_templates("U02:%x[0,1]")
    assert u02.id == "U02" and u02.cells == ((0, 1),)
    (u18,) = parse_templates("U18:%x[0,1]/%x[0,2]/%x[0,4]")
    assert u18.cells == ((0, 1), (0, 2), (0, 4))


@pytest.mark.parametrize("bad", ["U99:%x[0]", "X01:%x[0,1]", "U01:%x[0,1]/", "U01 %x[0,1]", "U01:%x[9,1]"])
def test_malformed_templates(bad):
    with pytest.raises(TemplateSyntaxError):
        parse_templates(bad)


def test_expansion_sentinels_and_combined():
    (u00,) = parse_templates("U00:%x[-2,1]")
    (u02,) = parse_templates("U02:%x[0,1]")
    matrix = [["0", "chest", "chest"], ["1", "pain", "pain"]]
    assert expand_features(matrix, [u00])[0] == ["U00:_B-2"]
    assert expand_features(matrix, [u02])[1] == ["U02:pain"]
    (u04,) = parse_templates("U04:%x[2,1]")
    assert expand_features(matrix, [u04])[1] == ["U04:_B+2"]
    with pytest.raises(ColumnOutOfRange):
        expand_features(matrix, parse_templates("U05:%x[0,5]"))


def test_combined_weekday_feature():
    tokens, _ = preprocess("Monday", Gazetteer.load())
    feats = expand_features(ter_matrix(tokens), parse_templates(TER_TEMPLATE_TEXT))[0]
    assert "U18:Monday/Weekday/UpperInitial" in feats


def test_template_sets_are_complete():
    assert [t.id for t in parse_templates(EVENT_TEMPLATE_TEXT)] == [f"U{i:02d}" for i in range(20)]
    assert [t.id for t in parse_templates(TER_TEMPLATE_TEXT)] == [f"U{i:02d}" for i in range(19)]


# --- label schemas -------------------------------------------------------------

def test_encode_decode():
    tokens, _ = preprocess("severe chest pain and cough")
    ms = [EventMention("E1", Span(0, 17), "Problem"), EventMention("E2", Span(22, 27), "Problem")]
    assert encode_labels(ms, tokens, "BIO") == ["B", "I", "I", "O", "B"]
    assert encode_labels(ms, tokens, "WBIO") == ["B", "I", "I", "O", "W"]
    assert encode_labels(ms, tokens, "IO") == ["I", "I", "I", "O", "I"]
    assert decode_labels(["I", "I"], None, "IO") == [(0, 2)]
    assert decode_labels(["B", "I", "I", "O", "W"], None, "WBIO") == [(0, 3), (4, 5)]


def test_invalid_gold_rejected():
    with pytest.raises(InvalidGoldLabel):
        prepare([([["0", "a", "a"], ["1", "b", "b"]], ["O", "I"])], "BIO", TEMPLATES)
    with pytest.raises(EmptyCorpus):
        prepare([], "BIO", TEMPLATES)


# --- learning and inference oracles -------------------------------------------

def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    _, index, batch = prepare(random_sentences(rng, 3, 5), "BIO", TEMPLATES)
    n = len(index) * 3 + 9
    for _ in range(5):
        w = rng.normal(scale=0.5, size=n)
        _, g = objective(w, batch, 1.0)
        h = 1e-5
        num = np.array([(objective(w + h * e, batch, 1.0)[0] - objective(w - h * e, batch, 1.0)[0]) / (2 * h)
                        for e in np.eye(n)])
        assert np.linalg.norm(g - num) / max(np.linalg.norm(num), 1e-12) < 1e-4


def test_viterbi_matches_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n, L = rng.integers(1, 6), rng.integers(2, 5)
        E, T = rng.normal(size=(n, L)), rng.normal(size=(L, L))
        best = max(itertools.product(range(L), repeat=n),
                   key=lambda p: E[np.arange(n), p].sum() + sum(T[a, b] for a, b in zip(p, p[1:])))
        assert viterbi(E, T) == list(best)


def _random_model(rng):
    sents = random_sentences(rng, 2, 4)
    labels, index, _ = prepare(sents, "BIO", TEMPLATES)
    w = rng.normal(size=len(index) * len(labels) + len(labels) ** 2)
    return CrfModel(labels, index, w, TEMPLATES), sents


def test_partition_matches_enumeration():
    rng = np.random.default_rng(1)
    for _ in range(20):
        model, sents = _random_model(rng)
        matrix = sents[0][0]
        brute = logsumexp([path_score(model, matrix, p) for p in itertools.product(model.labels, repeat=len(matrix))])
        assert log_partition(model, matrix) == pytest.approx(brute, abs=1e-9)


def test_separable_sentence_is_reproduced():
    sent = ([["0", "aspirin", "n"], ["1", "daily", "n"], ["2", "given", "n"]], ["B", "O", "O"])
    model = train([sent], "BIO", TEMPLATES, max_iter=100)
    assert model.decode(sent[0]) == sent[1]
    assert model.decode([]) == []


def test_constrained_decoding_never_emits_o_then_i():
    rng = np.random.default_rng(4)
    model, _ = _random_model(rng)
    t = model.transitions
    t[model.labels.index("O"), model.labels.index("I")] = 50.0
    for matrix, _ in random_sentences(rng, 30, 6):
        assert is_valid(model.decode(matrix, constrained=True), "BIO")


def test_training_is_deterministic_and_serializable(tmp_path):
    rng = np.random.default_rng(7)
    sents = random_sentences(rng, 20, 6)
    a = train(sents, "BIO", TEMPLATES, max_iter=50)
    b = train(sents, "BIO", TEMPLATES, max_iter=50)
    assert a.to_json() == b.to_json()
    path = tmp_path / "m.json"
    a.save(path)
    c = CrfModel.load(path)
    assert c.to_json() == a.to_json()
    assert all(c.decode(m) == a.decode(m) for m, _ in sents)


def test_wbio_model_labels():
    sent = ([["0", "ECG", "g"], ["1", "normal", "n"]], ["W", "O"])
    assert train([sent], "WBIO", TEMPLATES, max_iter=20).labels == ["B", "I", "O", "W"]


def test_objective_improves_and_sgd_runs():
    rng = np.random.default_rng(8)
    sents = random_sentences(rng, 15, 5)
    model = train(sents, "BIO", TEMPLATES, max_iter=50)
    assert model.history[-1] > model.history[0]
    sgd = train(sents, "BIO", TEMPLATES, optimizer="sgd", max_iter=5, seed=1)
    assert sgd.history[-1] > sgd.history[0]
