import pytest

from clintime.corpus import Span, TimexMention
from clintime.errors import RuleCompileError
from clintime.evaluation import match_spans
from clintime.preproc import Gazetteer, preprocess
from clintime.tern import (
    extract_timexes, load_rules, merge_hybrid, parse_rules, post_filter, recognize_ml, recognize_rules, train_ter,
    ter_examples,
)
from clintime.tern.normalize import NormContext

GAZ = Gazetteer.load()
RULES = load_rules()

FIXTURES = {
    # slash patterns
    "MM/DD/YYYY": ("Seen on 03/15/2012 in clinic.", "03/15/2012"),
    "MM/DD/YY": ("Seen on 3/15/12 in clinic.", "3/15/12"),
    "YYYY/DD/MM": ("Seen on 2012/15/03 in clinic.", "2012/15/03"),
    "MM/DD": ("Seen on 3/15 in clinic.", "3/15"),
    # lexical family
    "postoperative day": ("Drain removed on postoperative day one.", "postoperative day one"),
    "hospital day": ("Fever spiked on hospital day five.", "hospital day five"),
    "today": ("Discharged home today.", "today"),
    # gazetteer families
    "ClinicalFrequency": ("Aspirin bid.", "bid"),
    "Duration": ("Stayed overnight for observation.", "overnight"),
    "Festival": ("Seen before Christmas.", "Christmas"),
    "Season": ("Worse in winter.", "winter"),
    "Weekday": ("Admitted on Monday.", "Monday"),
    "Month": ("Admitted in March 2010.", "March 2010"),
    "LiteralTime": ("Given at noon.", "noon"),
    "TemporalModifier": ("Symptoms began last week.", "last week"),
    "OrdinalNumber": ("On the third day pain eased.", "the third day"),
    "LiteralNumber": ("Pain for three days.", "three days"),
}


def found(text, rules=RULES):
    tokens, sentences = preprocess(text, GAZ)
    ms = post_filter(recognize_rules(tokens, rules, sentences), text, tokens)
    return [text[m.span.start:m.span.end] for m in ms]


def test_rule_inventory():
    assert len(RULES) == 65
    assert len({r.id for r in RULES}) == 65


@pytest.mark.parametrize("family", FIXTURES)
def test_fixture_recognized(family):
    text, surface = FIXTURES[family]
    assert surface in found(text)


@pytest.mark.parametrize("text, dropped", [
    ("Pulmonary artery pressure was 42/21 today.", "42/21"),
    ("Call 617-555-0134 with questions.", "617-555-0134"),
    ("Moved to ward 12 overnight.", "12"),
    ("Page 555-0134 if febrile.", "555-0134"),
])
def test_post_filter_drops(text, dropped):
    assert dropped not in found(text)


def test_post_filter_keeps_real_dates_and_protected():
    assert "12/25" in found("Seen on 12/25 for follow up.")
    text = "Room Monday"
    tokens, _ = preprocess(text, GAZ)
    m = TimexMention("T1", Span(5, 11), "Date", "UNK")
    assert post_filter([m], text, tokens) == [m]


def test_rule_dsl_errors():
    with pytest.raises(RuleCompileError):
        parse_rules("X1\t10\tDate")
    with pytest.raises(RuleCompileError):
        parse_rules("X1\t10\tDate\tgaz:Nope")
    with pytest.raises(RuleCompileError):
        parse_rules("X1\t10\tDate\tre:(")
    with pytest.raises(RuleCompileError):
        parse_rules("X1\t10\tEpoch\tre:x")
    with pytest.raises(RuleCompileError):
        parse_rules("X1\t10\tDate\t?re:x")
    with pytest.raises(RuleCompileError):
        parse_rules("X1\t10\tDate\tre:x\nX1\t10\tDate\tre:y")


def test_longest_match_then_priority():
    rules = parse_rules("A\t10\tDate\tre:march\nB\t5\tDate\tre:march re:\\d{4}\nC\t50\tDuration\tre:march")
    text = "in March 2010 ."
    tokens, sentences = preprocess(text, GAZ)
    (m,) = recognize_rules(tokens, rules, sentences)
    assert text[m.span.start:m.span.end] == "March 2010"
    (m,) = recognize_rules(preprocess("in March .", GAZ)[0], rules)
    assert m.ttype == "Duration"


def test_matches_do_not_cross_sentences():
    rules = parse_rules("A\t10\tDate\tre:march re:2010")
    text = "Seen in March. 2010 was hard."
    tokens, sentences = preprocess(text, GAZ)
    assert recognize_rules(tokens, rules, sentences) == []


def _m(s, e, t="Date"):
    return TimexMention("", Span(s, e), t, "UNK")


def test_merge_union_rules():
    rule = [_m(0, 5), _m(10, 15)]
    assert merge_hybrid(rule, [_m(20, 25, "Duration")])[-1].span == Span(20, 25)
    grown = merge_hybrid(rule, [_m(3, 8, "Duration")])
    assert grown[0].span == Span(0, 8) and grown[0].ttype == "Date"
    bridged = merge_hybrid(rule, [_m(3, 12)])
    assert [m.span for m in bridged] == [Span(0, 5), Span(10, 15)]
    assert merge_hybrid(rule, [_m(0, 5)]) == rule


def test_extract_timexes_normalizes():
    text = "Seen yesterday, aspirin bid."
    tokens, sentences = preprocess(text, GAZ)
    ms = extract_timexes(text, tokens, sentences, RULES, ctx=NormContext("2012-03-10"))
    assert [(m.id, m.value) for m in ms] == [("T1", "2012-03-09"), ("T2", "RP12H")]


def test_hybrid_recall_dominates(synthetic_docs):
    train, test = synthetic_docs[:16], synthetic_docs[16:]
    examples = []
    for adoc in train:
        tokens, sentences = preprocess(adoc.text, GAZ)
        examples.extend(ter_examples(tokens, sentences, adoc.timexes))
    model = train_ter(examples, max_iter=100)
    totals = {"rule": [0, 0], "ml": [0, 0], "hybrid": [0, 0]}
    for adoc in test:
        tokens, sentences = preprocess(adoc.text, GAZ)
        rule = recognize_rules(tokens, RULES, sentences)
        ml = recognize_ml(tokens, sentences, model)
        outputs = {"rule": rule, "ml": ml, "hybrid": merge_hybrid(rule, ml)}
        for name, sys in outputs.items():
            counts, _ = match_spans(list(adoc.timexes), sys, "Lenient")
            totals[name][0] += counts.tp
            totals[name][1] += counts.tp + counts.fn
    recall = {k: tp / n for k, (tp, n) in totals.items()}
    assert recall["hybrid"] >= max(recall["rule"], recall["ml"])
