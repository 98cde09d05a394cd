"""Normalization against an independent calendar oracle (stdlib ``datetime`` only)."""
from datetime import date, timedelta

import pytest
from hypothesis import given, strategies as st

from clintime.corpus import Span, TimexMention, valid_timex_value
from clintime.errors import UnnormalizableExpression
from clintime.tern import NormContext, detect_modifier, infer_type, normalize

ANCHOR = date(2012, 3, 10)  # a Saturday


def day(n, anchor=ANCHOR):
    return (anchor + timedelta(days=n)).isoformat()


def month(n, anchor=ANCHOR):
    k = anchor.year * 12 + anchor.month - 1 + n
    return f"{k // 12:04d}-{k % 12 + 1:02d}"


def weekday_back(wd, strict=False, anchor=ANCHOR):
    back = (anchor.weekday() - wd) % 7
    if strict and back == 0:
        back = 7
    return day(-back, anchor)


def weekday_ahead(wd, anchor=ANCHOR):
    ahead = (wd - anchor.weekday()) % 7 or 7
    return day(ahead, anchor)


def run(surface, ttype=None, anchor=ANCHOR, text=None):
    text = text or surface
    start = text.index(surface)
    m = TimexMention("T1", Span(start, start + len(surface)), ttype or infer_type(surface), "UNK")
    return normalize(m, text, NormContext(anchor))


CASES = [
    # explicit dates
    ("January 4 1988", "Date", "1988-01-04"),
    ("August 23, 1993", "Date", "1993-08-23"),
    ("03/15/2012", "Date", "2012-03-15"),
    ("3/15/12", "Date", "2012-03-15"),
    ("3/15/85", "Date", "1985-03-15"),
    ("2012/25/12", "Date", "2012-12-25"),
    ("3/15", "Date", "2012-03-15"),
    ("2011-11-02", "Date", "2011-11-02"),
    ("March 2010", "Date", "2010-03"),
    ("1999", "Date", "1999"),
    ("4th of July 2009", "Date", "2009-07-04"),
    # relative days and weeks
    ("today", "Date", day(0)),
    ("yesterday", "Date", day(-1)),
    ("tomorrow", "Date", day(1)),
    ("two days ago", "Date", day(-2)),
    ("5 days ago", "Date", day(-5)),
    ("three weeks ago", "Date", day(-21)),
    ("last week", "Date", day(-7)),
    ("in two days", "Date", day(2)),
    ("two months ago", "Date", month(-2)),
    ("last month", "Date", month(-1)),
    ("next month", "Date", month(1)),
    ("last year", "Date", str(ANCHOR.year - 1)),
    ("two years ago", "Date", str(ANCHOR.year - 2)),
    # clinical day counters
    ("postoperative day one", "Date", day(1)),
    ("POD 3", "Date", day(3)),
    ("hospital day five", "Date", day(4)),
    # weekdays
    ("Monday", "Date", weekday_back(0)),
    ("Saturday", "Date", weekday_back(5)),
    ("last Saturday", "Date", weekday_back(5, strict=True)),
    ("next Tuesday", "Date", weekday_ahead(1)),
    # durations
    ("two weeks", "Duration", "P2W"),
    ("3 days", "Duration", "P3D"),
    ("six months", "Duration", "P6M"),
    ("48 hours", "Duration", "PT48H"),
    ("ten years", "Duration", "P10Y"),
    ("30 minutes", "Duration", "PT30M"),
    ("several days", "Duration", "PXD"),
    # frequencies
    ("qd", "Frequency", "RP24H"),
    ("bid", "Frequency", "RP12H"),
    ("tid", "Frequency", "RP8H"),
    ("qid", "Frequency", "RP6H"),
    ("q6h", "Frequency", "RP6H"),
    ("q4h", "Frequency", "RP4H"),
    ("every morning", "Frequency", "RP24H"),
    ("twice daily", "Frequency", "RP12H"),
    ("three times a day", "Frequency", "RP8H"),
    ("every 2 days", "Frequency", f"RP{24 * 2}H"),
    ("twice a week", "Frequency", "R2P1W"),
    ("every 2 weeks", "Frequency", "RP2W"),
]


def test_table_size():
    assert len(CASES) == 50


@pytest.mark.parametrize("surface, ttype, expected", CASES)
def test_case_table(surface, ttype, expected):
    out = run(surface, ttype)
    assert out.value == expected
    assert valid_timex_value(out.ttype, out.value)


@pytest.mark.parametrize("surface, ttype", [(s, t) for s, t, _ in CASES])
def test_type_inference(surface, ttype):
    assert infer_type(surface) == ttype


@pytest.mark.parametrize("text, surface, modifier", [
    ("about two weeks", "about two weeks", "Approx"),
    ("for approximately 3 days", "3 days", "Approx"),
    ("more than 6 months", "more than 6 months", "More"),
    ("less than 2 weeks", "less than 2 weeks", "Less"),
    ("early March 2010", "early March 2010", "Start"),
    ("mid-March 2010", "mid-March 2010", "Mid"),
    ("3 days after surgery", "3 days", "NA"),
])
def test_modifiers(text, surface, modifier):
    start = text.index(surface)
    assert detect_modifier(surface, text[:start]) == modifier


def test_festivals():
    assert run("Easter 2012").value == "2012-04-08"
    assert run("Thanksgiving 2011").value == "2011-11-24"
    assert run("Christmas").value == "2012-12-25"


def test_failure_is_unk_or_raises():
    assert run("sometime", "Date").value == "UNK"
    m = TimexMention("T1", Span(0, 8), "Date", "UNK")
    with pytest.raises(UnnormalizableExpression):
        normalize(m, "sometime", NormContext(ANCHOR), strict=True)


def test_context_accepts_iso_strings():
    assert NormContext("2012-03-10").anchor == ANCHOR
    assert NormContext("2012-03-10", "2012-03-01").anchor == date(2012, 3, 1)


RELATIVE = ["yesterday", "today", "two days ago", "last week", "postoperative day one", "hospital day five",
            "Monday", "next Tuesday", "in two days", "three weeks ago"]


@given(st.integers(min_value=-4000, max_value=4000), st.sampled_from(RELATIVE))
def test_translation_covariance(k, surface):
    # weekday names resolve within the anchor's week, so only whole-week shifts carry over
    if surface in ("Monday", "next Tuesday"):
        k -= k % 7
    a = date.fromisoformat(run(surface, "Date").value)
    b = date.fromisoformat(run(surface, "Date", anchor=ANCHOR + timedelta(days=k)).value)
    assert b - a == timedelta(days=k)


@given(st.sampled_from([c[0] for c in CASES] + ["sometime", "UNK", "q99x"]),
       st.dates(min_value=date(1950, 1, 1), max_value=date(2050, 12, 31)))
def test_output_always_reparses(surface, anchor):
    out = run(surface, anchor=anchor)
    assert valid_timex_value(out.ttype, out.value)
