"""TIMEX3 normalization: ISO-8601 values, types and modifiers."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from datetime import date, timedelta

from dateutil.easter import easter
from dateutil.relativedelta import relativedelta

from ..corpus import TimexMention, valid_timex_value
from ..errors import UnnormalizableExpression

PIVOT = 30  # two-digit years below this are 20xx, the rest 19xx (1930..2029)

MONTHS = {
    "january": 1, "jan": 1, "february": 2, "feb": 2, "march": 3, "mar": 3, "april": 4, "apr": 4,
    "may": 5, "june": 6, "jun": 6, "july": 7, "jul": 7, "august": 8, "aug": 8,
    "september": 9, "sep": 9, "sept": 9, "october": 10, "oct": 10, "november": 11, "nov": 11,
    "december": 12, "dec": 12,
}
WEEKDAYS = {
    "monday": 0, "mon": 0, "tuesday": 1, "tue": 1, "tues": 1, "wednesday": 2, "wed": 2,
    "thursday": 3, "thu": 3, "thur": 3, "thurs": 3, "friday": 4, "fri": 4,
    "saturday": 5, "sat": 5, "sunday": 6, "sun": 6,
}
NUMBERS = {
    "a": 1, "an": 1, "one": 1, "two": 2, "couple": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13,
    "fourteen": 14, "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19, "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50, "sixty": 60,
}
VAGUE = {"several", "few", "many", "some", "multiple"}
ORDINALS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5, "sixth": 6, "seventh": 7,
    "eighth": 8, "ninth": 9, "tenth": 10, "eleventh": 11, "twelfth": 12,
}
# unit -> (ISO designator, time part?, multiplier)
UNITS = {
    "second": ("S", True, 1), "sec": ("S", True, 1), "minute": ("M", True, 1), "min": ("M", True, 1),
    "hour": ("H", True, 1), "hr": ("H", True, 1), "h": ("H", True, 1),
    "day": ("D", False, 1), "d": ("D", False, 1), "night": ("D", False, 1),
    "week": ("W", False, 1), "wk": ("W", False, 1), "month": ("M", False, 1), "mo": ("M", False, 1),
    "year": ("Y", False, 1), "yr": ("Y", False, 1), "decade": ("Y", False, 10),
}
SEASONS = {"spring": "SP", "summer": "SU", "autumn": "FA", "fall": "FA", "winter": "WI"}
PARTS_OF_DAY = {"morning": "MO", "afternoon": "AF", "evening": "EV", "night": "NI", "tonight": "NI"}

# fixed frequency forms; per-day counts are written as hour periods (qd -> RP24H)
FREQUENCIES = {
    "qd": "RP24H", "q.d.": "RP24H", "daily": "RP24H", "once daily": "RP24H", "once a day": "RP24H",
    "every day": "RP24H", "every morning": "RP24H", "every evening": "RP24H", "every night": "RP24H",
    "qam": "RP24H", "q.a.m.": "RP24H", "qpm": "RP24H", "q.p.m.": "RP24H", "qhs": "RP24H",
    "q.h.s.": "RP24H", "nightly": "RP24H", "every afternoon": "RP24H",
    "bid": "RP12H", "b.i.d.": "RP12H", "twice daily": "RP12H", "twice a day": "RP12H",
    "tid": "RP8H", "t.i.d.": "RP8H", "three times daily": "RP8H", "thrice daily": "RP8H",
    "qid": "RP6H", "q.i.d.": "RP6H", "four times daily": "RP6H",
    "qod": "RP48H", "q.o.d.": "RP48H", "every other day": "RP48H",
    "hourly": "RP1H", "every hour": "RP1H",
    "weekly": "RP1W", "once weekly": "RP1W", "every week": "RP1W", "every other week": "RP2W",
    "twice weekly": "R2P1W", "monthly": "RP1M", "once monthly": "RP1M", "every month": "RP1M",
    "yearly": "RP1Y", "annually": "RP1Y", "every year": "RP1Y",
}
FESTIVALS = {
    "christmas": (12, 25), "christmas day": (12, 25), "christmas eve": (12, 24),
    "new year": (1, 1), "new year's day": (1, 1), "new year's eve": (12, 31),
    "independence day": (7, 4), "halloween": (10, 31),
}

MODIFIER_CUES = (
    ("Approx", ("about", "approximately", "around", "roughly", "approx", "approx.", "~", "some")),
    ("More", ("more than", "greater than", "longer than", "over", "at least", ">")),
    ("Less", ("less than", "fewer than", "shorter than", "under", "within", "nearly", "almost",
              "at most", "<")),
    ("Start", ("early", "beginning of", "start of")),
    ("Mid", ("mid", "middle of")),
    ("End", ("late", "end of")),
)


@dataclass(frozen=True)
class NormContext:
    anchor_date: date
    section_anchor: date | None = None

    def __post_init__(self):
        for name in ("anchor_date", "section_anchor"):
            v = getattr(self, name)
            if isinstance(v, str):
                object.__setattr__(self, name, date.fromisoformat(v))
        if not isinstance(self.anchor_date, date):
            raise ValueError("anchor_date must be a calendar date")

    @property
    def anchor(self) -> date:
        return self.section_anchor or self.anchor_date


class _Fail(Exception):
    pass


def _words(s: str) -> list[str]:
    return re.findall(r"[a-z]+(?:'[a-z]+)?\.?(?:[a-z]\.)*|\d+(?:\.\d+)?(?:st|nd|rd|th)?|[~<>]", s.lower())


def _year(tok: str) -> int:
    y = int(tok)
    if len(tok) == 2:
        return 2000 + y if y < PIVOT else 1900 + y
    return y


def _number(word: str):
    """Numeric amount of a word; ``"X"`` for vague amounts, None otherwise."""
    if re.fullmatch(r"\d+(\.\d+)?", word):
        n = float(word)
        return int(n) if n.is_integer() else n
    if word in NUMBERS:
        return NUMBERS[word]
    if word in VAGUE:
        return "X"
    return None


def _unit(word: str):
    w = word.rstrip(".")
    if w in UNITS:
        return UNITS[w]
    if w.endswith("s") and w[:-1] in UNITS:
        return UNITS[w[:-1]]
    if w in ("hrs", "mins", "secs", "wks", "yrs", "mos"):
        return UNITS[w[:-1]]
    return None


def _mk_date(y, m, d) -> date:
    try:
        return date(y, m, d)
    except ValueError as exc:
        raise _Fail(str(exc)) from None


def _iso(d: date) -> str:
    return d.isoformat()


def _shift(anchor: date, n, letter: str, sign: int):
    """Shift ``anchor`` by ``n`` units; returns the value at the unit's precision."""
    if n == "X" or isinstance(n, float):
        raise _Fail("vague relative amount")
    if letter == "D":
        return _iso(anchor + timedelta(days=sign * n))
    if letter == "W":
        return _iso(anchor + timedelta(weeks=sign * n))
    if letter == "M":
        return (anchor + relativedelta(months=sign * n)).strftime("%Y-%m")
    if letter == "Y":
        return f"{(anchor + relativedelta(years=sign * n)).year:04d}"
    raise _Fail("sub-day relative date")


def _weekday(anchor: date, wd: int, how: str) -> date:
    back = (anchor.weekday() - wd) % 7
    if how == "last":
        return anchor - timedelta(days=back or 7)
    if how == "next":
        return anchor + timedelta(days=(wd - anchor.weekday()) % 7 or 7)
    return anchor - timedelta(days=back)  # on or before the anchor


def _festival(name: str, year: int) -> str:
    if name in FESTIVALS:
        return _iso(date(year, *FESTIVALS[name]))
    if name == "easter":
        return _iso(easter(year))
    if name == "thanksgiving":  # fourth Thursday of November
        first = date(year, 11, 1)
        return _iso(first + timedelta(days=(3 - first.weekday()) % 7 + 21))
    return f"{year:04d}"


# ---------------------------------------------------------------- dates

_NUMERIC = [
    (re.compile(r"(?<![\d/-])(\d{1,2})/(\d{1,2})/(\d{4})(?![\d/-])"), lambda m: (int(m[3]), int(m[1]), int(m[2]))),
    (re.compile(r"(?<![\d/-])(\d{1,2})/(\d{1,2})/(\d{2})(?![\d/-])"), lambda m: (_year(m[3]), int(m[1]), int(m[2]))),
    (re.compile(r"(?<![\d/-])(\d{4})/(\d{1,2})/(\d{1,2})(?![\d/-])"), lambda m: (int(m[1]), int(m[3]), int(m[2]))),
    (re.compile(r"(?<![\d/-])(\d{1,2})-(\d{1,2})-(\d{4})(?![\d/-])"), lambda m: (int(m[3]), int(m[1]), int(m[2]))),
    (re.compile(r"(?<![\d/-])(\d{4})-(\d{1,2})-(\d{1,2})(?![\d/-])"), lambda m: (int(m[1]), int(m[2]), int(m[3]))),
]
_RELATIVE_DIR = {"ago": -1, "earlier": -1, "prior": -1, "before": -1, "previously": -1,
                 "later": 1, "after": 1, "hence": 1}
_DAY_INDEX = re.compile(
    r"(?:post-?operative|post-?op|postop|pod|hospital)(?:\s+day)?\s*#?\s*(\w+)")


def _norm_date(s: str, ctx: NormContext) -> str:
    a = ctx.anchor
    for rx, parts in _NUMERIC:
        m = rx.search(s)
        if m:
            return _iso(_mk_date(*parts(m)))
    m = re.search(r"\b(\d{1,2})/(\d{1,2})\b", s)
    if m:
        return _iso(_mk_date(a.year, int(m[1]), int(m[2])))
    w = _words(s)

    m = _DAY_INDEX.search(s)
    if m:
        n = _number(m[1])
        if not isinstance(n, int):
            raise _Fail("day index")
        # hospital day 1 is the anchor day itself; postoperative day 0 is surgery day
        offset = n - 1 if s.lstrip().startswith("hospital") else n
        return _iso(a + timedelta(days=offset))

    month = next((MONTHS[x.rstrip(".")] for x in w if x.rstrip(".") in MONTHS), None)
    years = [x for x in w if re.fullmatch(r"(19|20)\d{2}", x)]
    year = int(years[0]) if years else None
    if month is not None:
        days = [int(re.match(r"\d+", x)[0]) for x in w
                if re.fullmatch(r"\d{1,2}(st|nd|rd|th)?", x) and 1 <= int(re.match(r"\d+", x)[0]) <= 31]
        y = year if year is not None else a.year
        if days:
            return _iso(_mk_date(y, month, days[0]))
        return f"{y:04d}-{month:02d}"

    for name in sorted(FESTIVALS.keys() | {"easter", "thanksgiving", "yom kippur", "nowruz",
                                            "hanukkah", "ramadan", "diwali"}, key=len, reverse=True):
        if re.search(rf"\b{re.escape(name)}\b", s):
            return _festival(name, year if year is not None else a.year)

    season = next((SEASONS[x] for x in w if x in SEASONS), None)
    if season:
        y = year if year is not None else a.year + (-1 if "last" in w or "previous" in w else 1 if "next" in w else 0)
        return f"{y:04d}-{season}"

    wd = next((WEEKDAYS[x.rstrip(".")] for x in w if x.rstrip(".") in WEEKDAYS), None)
    if wd is not None:
        how = "last" if {"last", "past", "previous"} & set(w) else "next" if {"next", "following"} & set(w) else "on"
        return _iso(_weekday(a, wd, how))

    if year is not None and len(w) <= 3:
        return f"{year:04d}"

    for word, delta in (("today", 0), ("tonight", 0), ("yesterday", -1), ("tomorrow", 1)):
        if word in w:
            return _iso(a + timedelta(days=delta))

    # "3 days ago", "two weeks later", "a few months earlier"
    direction = next((_RELATIVE_DIR[x] for x in w if x in _RELATIVE_DIR), None)
    unit_idx = next((i for i, x in enumerate(w) if _unit(x)), None)
    if direction is None and w and w[0] == "in" and unit_idx is not None:
        direction = 1  # "in two days"
    if direction is not None and unit_idx is not None and unit_idx > 0:
        letter, is_time, mult = _unit(w[unit_idx])
        n = _number(w[unit_idx - 1])
        if n is None and w[unit_idx - 1] == "of" and unit_idx > 1:
            n = _number(w[unit_idx - 2])
        if n is None:
            raise _Fail("relative amount")
        if is_time:
            raise _Fail("sub-day relative date")
        return _shift(a, n if n == "X" else n * mult, letter, direction)

    # "the following day", "last week", "the day before", "Nth day of admission"
    if unit_idx is not None:
        letter = _unit(w[unit_idx])[0]
        ords = [ORDINALS.get(x) or (int(x[:-2]) if re.fullmatch(r"\d+(st|nd|rd|th)", x) else None) for x in w]
        ords = [o for o in ords if o]
        if ords:
            return _shift(a, ords[0] - 1, letter, 1) if letter == "D" else _shift(a, ords[0] - 1, letter, 1)
        rest = set(w)
        if rest & {"following", "next"} or ("day" in rest and "after" in rest):
            sign = 1
        elif rest & {"previous", "prior", "last", "past", "before", "preceding"}:
            sign = -1
        elif rest & {"this", "same", "of"}:
            sign = 0
        else:
            raise _Fail("unanchored unit")
        if w[unit_idx].startswith("weekend"):
            sat = _weekday(a, 5, "last" if sign < 0 else "next" if sign > 0 else "on")
            return _iso(sat)
        if letter in ("D", "W"):
            return _shift(a, 1, letter, sign)
        return _shift(a, 1, letter, sign)
    raise _Fail("no date pattern")


# ---------------------------------------------------------------- times

def _norm_time(s: str, ctx: NormContext) -> str:
    a = ctx.anchor
    w = _words(s)
    day = a
    if "yesterday" in w or "last" in w:
        day = a - timedelta(days=1)
    elif "tomorrow" in w:
        day = a + timedelta(days=1)
    wd = next((WEEKDAYS[x] for x in w if x in WEEKDAYS), None)
    if wd is not None:
        day = _weekday(a, wd, "on")
    m = re.search(r"(\d{1,2})(?::(\d{2}))?(?::\d{2})?\s*(a\.?m\.?|p\.?m\.?)?", s)
    if m and (m[2] or m[3]):
        h, mi = int(m[1]), int(m[2] or 0)
        if m[3]:
            if not 1 <= h <= 12:
                raise _Fail("12-hour clock")
            h = h % 12 + (12 if m[3].startswith("p") else 0)
        if h > 23 or mi > 59:
            raise _Fail("clock range")
        return f"{_iso(day)}T{h:02d}:{mi:02d}"
    if "noon" in w:
        return f"{_iso(day)}T12:00"
    if "midnight" in w:
        return f"{_iso(day)}T00:00"
    if "last" in w and "night" in w:
        return f"{_iso(a - timedelta(days=1))}TNI"
    part = next((PARTS_OF_DAY[x] for x in w if x in PARTS_OF_DAY), None)
    if part:
        return f"{_iso(day)}T{part}"
    raise _Fail("no time pattern")


# ---------------------------------------------------------------- durations

def _period(n, letter: str, is_time: bool) -> str:
    if isinstance(n, float) and n.is_integer():
        n = int(n)
    return f"P{'T' if is_time else ''}{n}{letter}"


def _norm_duration(s: str, ctx: NormContext) -> str:
    w = _words(s)
    if "overnight" in w or ("over" in w and "night" in w):
        return "PT12H"
    if w and w[-1].startswith("weekend"):
        return "P2D"
    if "half" in w:
        unit = next((_unit(x) for x in w if _unit(x)), None)
        if unit and unit[0] == "H":
            return "PT30M"
        if unit and unit[0] == "D":
            return "PT12H"
        raise _Fail("half of unit")
    for i, x in enumerate(w):
        unit = _unit(x)
        if unit is None:
            continue
        letter, is_time, mult = unit
        n = None
        for back in (1, 2):
            if i - back >= 0:
                n = _number(w[i - back])
                if n is not None:
                    break
        if n is None:
            m = re.search(r"(\d+)\s*-\s*" + re.escape(x), s)
            n = int(m[1]) if m else ("X" if x.endswith("s") else 1)
        if n != "X":
            n = n * mult
        return _period(n, letter, is_time)
    raise _Fail("no duration unit")


# ---------------------------------------------------------------- frequencies

_PER = {"day": 24, "d": 24, "daily": 24}


def _norm_frequency(s: str, ctx: NormContext) -> str:
    key = " ".join(s.lower().split())
    if key in FREQUENCIES:
        return FREQUENCIES[key]
    m = re.fullmatch(r"q\s*(\d+)\s*(?:h|hr|hrs|hours?)", key)
    if m:
        return f"RP{int(m[1])}H"
    w = _words(key)
    m = re.search(r"every\s+(other\s+)?(\w+)?\s*(\w+)$", key)
    if m and _unit(m[3]):
        letter, is_time, mult = _unit(m[3])
        n = _number(m[2]) if m[2] else 1
        if not isinstance(n, int):
            raise _Fail("frequency amount")
        n *= mult * (2 if m[1] else 1)
        if letter == "D":
            return f"RP{24 * n}H"
        return f"RP{'T' if is_time and letter != 'H' else ''}{n}{letter}"
    # "twice a week", "3 times a day", "once per month"
    count = {"once": 1, "twice": 2, "thrice": 3}.get(w[0]) if w else None
    if count is None and len(w) >= 2 and w[1] in ("times", "x"):
        count = _number(w[0])
    unit = _unit(w[-1]) if w else None
    if isinstance(count, int) and count > 0 and unit:
        letter = unit[0]
        if letter == "D" and 24 % count == 0:
            return f"RP{24 // count}H"
        if letter == "H":
            return f"R{count}PT1H" if count > 1 else "RP1H"
        return f"R{count}P1{letter}" if count > 1 else f"RP1{letter}"
    if w and w[-1] in ("daily", "weekly", "monthly") and count:
        letter = {"daily": "D", "weekly": "W", "monthly": "M"}[w[-1]]
        if letter == "D" and 24 % count == 0:
            return f"RP{24 // count}H"
        return f"R{count}P1{letter}"
    raise _Fail("no frequency pattern")


_NORMALIZERS = {"Date": _norm_date, "Time": _norm_time, "Duration": _norm_duration,
                "Frequency": _norm_frequency}


def infer_type(surface: str) -> str:
    """Best-guess TIMEX3 type for a mention without a rule type hint."""
    s = " ".join(surface.lower().split())
    w = _words(s)
    if s in FREQUENCIES or re.fullmatch(r"q\s*\d+\s*h\w*", s) or "every" in w or "times" in w \
            or (w and w[0] in ("once", "twice", "thrice")):
        return "Frequency"
    if re.search(r"\d{1,2}:\d{2}|\d\s*(a\.?m\.?|p\.?m\.?)$", s) or {"noon", "midnight", "morning",
                                                                   "afternoon", "evening", "night"} & set(w) \
            and not {"every", "over"} & set(w):
        return "Time"
    if any(_unit(x) for x in w) and w[0] != "in" and not set(w) & (set(_RELATIVE_DIR) | {"last", "next", "this", "previous",
                                                                       "following", "hospital", "pod",
                                                                       "postoperative", "of"}):
        return "Duration"
    if "overnight" in w:
        return "Duration"
    return "Date"


def detect_modifier(surface: str, before: str = "") -> str:
    """Modifier from cue words in the surface, else in the two preceding words."""
    def find(text):
        low = " " + " ".join(_words(text)) + " "
        low = low.replace(" - ", " ")
        for mod, cues in MODIFIER_CUES:
            for cue in cues:
                if f" {cue} " in low or (cue == "mid" and re.search(r"\bmid-", text.lower())):
                    return mod
        return None

    found = find(surface)
    if found is None and before:
        found = find(" ".join(_words(before)[-2:]))
    return found or "NA"


def normalize(mention: TimexMention, text: str, ctx: NormContext, strict: bool = False) -> TimexMention:
    """Fill ``value`` and ``modifier``; a failed resolution yields ``"UNK"``."""
    surface = text[mention.span.start:mention.span.end]
    ttype = mention.ttype or infer_type(surface)
    before = text[max(0, mention.span.start - 40):mention.span.start]
    modifier = detect_modifier(surface, before)
    s = " ".join(surface.lower().split())
    try:
        value = _NORMALIZERS[ttype](s, ctx)
        if not valid_timex_value(ttype, value):
            raise _Fail(f"value {value!r} outside the {ttype} grammar")
    except (_Fail, ValueError, OverflowError) as exc:
        if strict:
            raise UnnormalizableExpression(surface, str(exc)) from None
        value = "UNK"
    return replace(mention, ttype=ttype, value=value, modifier=modifier)
