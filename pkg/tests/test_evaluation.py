from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from clintime.corpus import AnnotatedDocument, Document, EventMention, Span, TimexMention, TLink
from clintime.evaluation import (
    Counts, anchor_map, customary_score, evaluate, match_spans, prf, primary_score, score_tern,
)


def ev(i, s, e, cat="Problem"):
    return EventMention(f"E{i}", Span(s, e), cat)


def tx(i, s, e, ttype="Date", value="2012-03-10", mod="NA"):
    return TimexMention(f"T{i}", Span(s, e), ttype, value, mod)


def test_prf_hand_values():
    assert prf(0, 0, 0) == (0.0, 0.0, 0.0)
    p, r, f = prf(3, 1, 2)
    assert (p, r) == (0.75, 0.6)
    assert f == pytest.approx(float(2 * Fraction(3, 4) * Fraction(3, 5) / (Fraction(3, 4) + Fraction(3, 5))))


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_prf_bounds(tp, fp, fn):
    p, r, f = prf(tp, fp, fn)
    assert 0 <= f <= 1 and min(p, r) - 1e-12 <= f <= max(p, r) + 1e-12


def test_match_strict_and_lenient():
    gold = [ev(1, 0, 10), ev(2, 20, 30), ev(3, 40, 45)]
    sys = [ev(1, 0, 10), ev(2, 22, 35), ev(3, 50, 55)]
    strict, pairs = match_spans(gold, sys, "Strict")
    assert (strict.tp, strict.fp, strict.fn) == (1, 2, 2)
    assert [(g.id, s.id) for g, s in pairs] == [("E1", "E1")]
    lenient, pairs = match_spans(gold, sys, "Lenient")
    assert (lenient.tp, lenient.fp, lenient.fn) == (2, 1, 1)
    assert [(g.id, s.id) for g, s in pairs] == [("E1", "E1"), ("E2", "E2")]


def test_lenient_is_one_to_one():
    gold = [ev(1, 0, 10), ev(2, 5, 15)]
    sys = [ev(1, 0, 15)]
    counts, _ = match_spans(gold, sys, "Lenient")
    assert (counts.tp, counts.fp, counts.fn) == (1, 0, 1)


def test_lenient_prefers_exact_match():
    gold = [ev(1, 0, 10), ev(2, 0, 4)]
    sys = [ev(1, 0, 4), ev(2, 0, 10)]
    _, pairs = match_spans(gold, sys, "Lenient")
    assert [(g.span, s.span) for g, s in pairs] == [(Span(0, 10), Span(0, 10)), (Span(0, 4), Span(0, 4))]


def test_unknown_mode():
    with pytest.raises(ValueError):
        match_spans([], [], "Fuzzy")


def test_primary_score_reproduces_published_value():
    assert round(primary_score(0.8927, 0.7044), 2) == 0.63
    assert primary_score(1.0, 1.0) == 1.0


def test_score_tern_attributes():
    gold = [tx(1, 0, 5), tx(2, 10, 20, "Duration", "P2D"), tx(3, 30, 40, mod="Approx")]
    sys = [tx(1, 0, 5), tx(2, 12, 20, "Date", "P2D"), tx(3, 30, 40, value="2012-03-11", mod="Approx")]
    s = score_tern(gold, sys)
    assert s.matched == 3 and s.strict.tp == 2
    assert s.type_accuracy == pytest.approx(2 / 3)
    assert s.value_accuracy == pytest.approx(2 / 3)
    assert s.modifier_accuracy == 1.0
    assert s.primary == pytest.approx(1.0 * 2 / 3)


def test_customary_normalizes_after():
    gold = [TLink("L1", "E1", "E2", "Before", "Other")]
    sys = [TLink("L1", "E2", "E1", "After", "Other")]
    assert customary_score(gold, sys) == (1.0, 1.0, 1.0)


def _doc(doc_id, events=(), timexes=(), tlinks=()):
    return AnnotatedDocument(Document(doc_id, "x" * 100, {"dct": "2012-03-10"}), (), tuple(events),
                             tuple(timexes), tuple(tlinks))


def test_anchor_map_renames_by_span():
    gold = _doc("d", [ev(1, 0, 10), ev(2, 20, 30)])
    sys = _doc("d", [ev(7, 0, 10), ev(8, 60, 70)])
    m = anchor_map(gold, sys)
    assert m["E7"] == "E1" and m["E8"] == "sys:E8" and m["ST-DCT"] == "ST-DCT"


def test_evaluate_end_to_end(tmp_path):
    links = [TLink("L1", "E1", "E2", "Before", "Prepositional"), TLink("L2", "E1", "ST-DCT", "Before", "Sectime")]
    gold = {"a": _doc("a", [ev(1, 0, 10), ev(2, 20, 30, "Treatment")], [tx(1, 40, 45)], links),
            "b": _doc("b", [ev(1, 0, 5)])}
    sys = {"a": _doc("a", [ev(3, 0, 10), ev(4, 20, 30, "Treatment")], [tx(1, 40, 45)],
                     [TLink("L1", "E3", "E4", "Before", "Prepositional")])}
    rep = evaluate(gold, sys)
    v = rep.values()
    assert rep.missing == ["b"] and v["documents"] == 2
    assert v["event.micro.strict.recall"] == pytest.approx(2 / 3)
    assert v["event.micro.strict.precision"] == 1.0
    assert v["tlink.customary.precision"] == 1.0 and v["tlink.customary.recall"] == 0.5
    assert all(0.0 <= x <= 1.0 for k, x in v.items() if isinstance(x, float))
    sub = evaluate(gold, sys, "sectime").values()
    assert sub["tlink.customary.recall"] == 0.0 and sub["tlink.subset"] == "sectime"
    paths = rep.write(tmp_path)
    assert [p.name for p in paths] == ["report.txt", "report.tsv"]
    assert "Documents: 2 (1 missing" in paths[0].read_text()
    assert "event.micro.strict.f1\t0.800000" in paths[1].read_text()


def test_counts_add():
    c = Counts(1, 2, 3)
    c.add(Counts(1, 1, 1))
    assert (c.tp, c.fp, c.fn) == (2, 3, 4)
