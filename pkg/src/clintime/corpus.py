"""Document and annotation model plus the standoff file format.

A standoff file looks like::

    #DOC <id>
    #META <key>=<value>
    #TEXT <n-lines>
    <raw text, exactly n lines>
    E<k>	EVENT	<category>	<start>	<end>	<negated>	<surface>
    T<k>	TIMEX	<type>	<start>	<end>	<value>	<modifier>	<surface>
    L<k>	TLINK	<sourceId>	<targetId>	<relation>	<origin>

Offsets count Unicode code points.  The surface column is optional on read;
when present it must equal the text slice.  Surfaces escape backslash, tab,
CR and LF as ``\\\\``, ``\\t``, ``\\r``, ``\\n``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .errors import ParseError, ValidationError

EVENT_CATEGORIES = ("Problem", "Treatment", "Test")
TIMEX_TYPES = ("Date", "Time", "Duration", "Frequency")
MODIFIERS = ("NA", "Approx", "More", "Less", "Start", "Mid", "End")
RELATIONS = ("Before", "After", "Overlap")
ORIGINS = ("Coordinate", "Prepositional", "Other", "Sectime", "Coref", "Closure")

ST_ADMISSION = "ST-ADMISSION"
ST_DISCHARGE = "ST-DISCHARGE"
ST_DCT = "ST-DCT"
# section-time anchor id -> meta key holding its date
SECTIME_META = {ST_ADMISSION: "admission", ST_DISCHARGE: "discharge", ST_DCT: "dct"}
META_KEYS = ("admission", "discharge", "dct")


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self):
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EventMention:
    id: str
    span: Span
    category: str
    negated: bool = False


@dataclass(frozen=True)
class TimexMention:
    id: str
    span: Span
    ttype: str | None = None
    value: str = ""
    modifier: str = "NA"


@dataclass(frozen=True)
class TLink:
    id: str
    source: str
    target: str
    relation: str
    origin: str


@dataclass(frozen=True)
class AnnotatedDocument:
    doc: Document
    tokens: tuple = ()
    events: tuple = ()
    timexes: tuple = ()
    tlinks: tuple = ()
    sections: tuple = ()  # (label, Span) pairs

    @property
    def id(self) -> str:
        return self.doc.id

    @property
    def text(self) -> str:
        return self.doc.text

    def surface(self, span: Span) -> str:
        return self.doc.text[span.start:span.end]

    def anchor_ids(self) -> set:
        ids = {e.id for e in self.events} | {t.id for t in self.timexes}
        ids |= {st for st, key in SECTIME_META.items() if key in self.doc.meta}
        return ids

    def with_annotations(self, **changes) -> "AnnotatedDocument":
        return replace(self, **{k: tuple(v) for k, v in changes.items()})


# --- TIMEX3 value grammar --------------------------------------------------

_DATE_RE = re.compile(r"^\d{4}(-(0[1-9]|1[0-2])(-(0[1-9]|[12]\d|3[01]))?)?$|^\d{4}-(SP|SU|FA|WI)$")
_TIME_RE = re.compile(
    r"^\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])T(([01]\d|2[0-3]):[0-5]\d|MO|AF|EV|NI)$"
)
_NUM = r"(\d+(\.\d+)?|X)"
_PERIOD = rf"P(?=[\dX]|T[\dX])({_NUM}Y)?({_NUM}M)?({_NUM}W)?({_NUM}D)?(T(?=[\dX])({_NUM}H)?({_NUM}M)?({_NUM}S)?)?"
_DURATION_RE = re.compile(rf"^{_PERIOD}$")
# repetition periods: hour/minute/second units may drop the T (RP24H)
_FREQUENCY_RE = re.compile(rf"^R\d*/?(?:{_PERIOD}|P(?:{_NUM}[YMWDHS])+)$")


def valid_timex_value(ttype: str, value: str) -> bool:
    """True if ``value`` parses under the grammar for ``ttype`` (or is ``UNK``)."""
    if value == "UNK":
        return True
    pattern = {
        "Date": _DATE_RE,
        "Time": _TIME_RE,
        "Duration": _DURATION_RE,
        "Frequency": _FREQUENCY_RE,
    }.get(ttype)
    return bool(pattern and pattern.match(value))


# --- validation --------------------------------------------------------------

def validate(adoc: AnnotatedDocument, check_values: bool = True) -> AnnotatedDocument:
    """Check every invariant of an annotated document; return it unchanged."""
    doc = adoc.doc
    if not doc.id:
        raise ValidationError("<doc>", "document id must be non-empty")
    for key, value in doc.meta.items():
        if key not in META_KEYS:
            raise ValidationError(doc.id, f"unknown meta key {key!r}")
        if not _DATE_RE.match(value) or len(value) != 10:
            raise ValidationError(doc.id, f"meta {key} is not a YYYY-MM-DD date: {value!r}")
    n = len(doc.text)
    seen = set()

    def check_id(id_):
        if not id_ or any(c in id_ for c in "\t\n\r "):
            raise ValidationError(id_ or "<empty>", "ids must be non-empty and contain no whitespace")
        if id_ in SECTIME_META:
            raise ValidationError(id_, "reserved section-time id used as a mention id")
        if id_ in seen:
            raise ValidationError(id_, "duplicate id")
        seen.add(id_)

    def check_span(id_, span):
        if span.end > n:
            raise ValidationError(id_, f"span [{span.start}, {span.end}) exceeds text length {n}")

    for ev in adoc.events:
        check_id(ev.id)
        check_span(ev.id, ev.span)
        if ev.category not in EVENT_CATEGORIES:
            raise ValidationError(ev.id, f"unknown event category {ev.category!r}")
        s = doc.text[ev.span.start:ev.span.end]
        if s[0].isspace() or s[-1].isspace():
            raise ValidationError(ev.id, "event span starts or ends with whitespace")
    for tx in adoc.timexes:
        check_id(tx.id)
        check_span(tx.id, tx.span)
        if tx.ttype not in TIMEX_TYPES:
            raise ValidationError(tx.id, f"unknown timex type {tx.ttype!r}")
        if tx.modifier not in MODIFIERS:
            raise ValidationError(tx.id, f"unknown modifier {tx.modifier!r}")
        if check_values and not valid_timex_value(tx.ttype, tx.value):
            raise ValidationError(tx.id, f"value {tx.value!r} does not parse as {tx.ttype}")
    anchors = adoc.anchor_ids()
    for ln in adoc.tlinks:
        check_id(ln.id)
        if ln.relation not in RELATIONS:
            raise ValidationError(ln.id, f"unknown relation {ln.relation!r}")
        if ln.origin not in ORIGINS:
            raise ValidationError(ln.id, f"unknown origin {ln.origin!r}")
        if ln.source == ln.target:
            raise ValidationError(ln.id, "source equals target")
        for end in (ln.source, ln.target):
            if end not in anchors:
                raise ValidationError(ln.id, f"dangling anchor {end!r}")
    return adoc


# --- standoff IO -------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _escape(s: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in s)


def _unescape(s: str) -> str:
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s) and s[i + 1] in _UNESCAPES:
            out.append(_UNESCAPES[s[i + 1]])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def natural_key(id_: str):
    """Sort key that orders E2 before E10."""
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", id_))


def _span_key(m):
    return (m.span.start, m.span.end, natural_key(m.id))


def canonical(adoc: AnnotatedDocument) -> AnnotatedDocument:
    return replace(
        adoc,
        events=tuple(sorted(adoc.events, key=_span_key)),
        timexes=tuple(sorted(adoc.timexes, key=_span_key)),
        tlinks=tuple(sorted(adoc.tlinks, key=lambda l: natural_key(l.id))),
    )


def dumps_standoff(adoc: AnnotatedDocument) -> str:
    adoc = canonical(adoc)
    doc = adoc.doc
    lines = [f"#DOC {doc.id}"]
    for key in sorted(doc.meta):
        lines.append(f"#META {key}={doc.meta[key]}")
    text_lines = doc.text.split("\n") if doc.text else []
    lines.append(f"#TEXT {len(text_lines)}")
    lines.extend(text_lines)
    for ev in adoc.events:
        lines.append("\t".join([
            ev.id, "EVENT", ev.category, str(ev.span.start), str(ev.span.end),
            "true" if ev.negated else "false", _escape(adoc.surface(ev.span)),
        ]))
    for tx in adoc.timexes:
        lines.append("\t".join([
            tx.id, "TIMEX", tx.ttype, str(tx.span.start), str(tx.span.end),
            tx.value, tx.modifier, _escape(adoc.surface(tx.span)),
        ]))
    for ln in adoc.tlinks:
        lines.append("\t".join([ln.id, "TLINK", ln.source, ln.target, ln.relation, ln.origin]))
    return "\n".join(lines) + "\n"


def write_standoff(adoc: AnnotatedDocument, path) -> None:
    validate(adoc)
    Path(path).write_text(dumps_standoff(adoc), encoding="utf-8", newline="\n")


def _int(field_, lineno, path):
    try:
        value = int(field_)
    except ValueError:
        raise ParseError(lineno, f"expected an integer offset, got {field_!r}", path) from None
    return value


def _span(fields, lineno, path):
    start, end = _int(fields[0], lineno, path), _int(fields[1], lineno, path)
    if not 0 <= start < end:
        raise ParseError(lineno, f"invalid span [{start}, {end})", path)
    return Span(start, end)


def loads_standoff(content: str, path=None, check_values: bool = True) -> AnnotatedDocument:
    lines = content.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    i = 0

    def header(prefix):
        nonlocal i
        if i >= len(lines) or not lines[i].startswith(prefix):
            raise ParseError(i + 1, f"expected {prefix.strip()!r} header", path)
        value = lines[i][len(prefix):]
        i += 1
        return value

    doc_id = header("#DOC ")
    meta = {}
    while i < len(lines) and lines[i].startswith("#META "):
        kv = lines[i][len("#META "):]
        if "=" not in kv:
            raise ParseError(i + 1, "META line needs key=value", path)
        key, value = kv.split("=", 1)
        if key in meta:
            raise ParseError(i + 1, f"duplicate META key {key!r}", path)
        meta[key] = value
        i += 1
    n_raw = header("#TEXT ")
    if not n_raw.isdigit():
        raise ParseError(i, f"bad line count {n_raw!r}", path)
    n_text = int(n_raw)
    if i + n_text > len(lines):
        raise ParseError(len(lines), f"text block declares {n_text} lines but file ends early", path)
    text = "\n".join(lines[i:i + n_text])
    i += n_text

    events, timexes, tlinks = [], [], []
    for lineno in range(i + 1, len(lines) + 1):
        line = lines[lineno - 1]
        if not line:
            raise ParseError(lineno, "blank annotation line", path)
        fields = line.split("\t")
        if len(fields) < 2:
            raise ParseError(lineno, "annotation line needs tab-separated fields", path)
        id_, kind = fields[0], fields[1]
        if kind == "EVENT":
            if len(fields) not in (6, 7):
                raise ParseError(lineno, "EVENT needs 6 or 7 fields", path)
            neg = fields[5]
            if neg not in ("true", "false"):
                raise ParseError(lineno, f"negated must be true/false, got {neg!r}", path)
            span = _span(fields[3:5], lineno, path)
            ann = EventMention(id_, span, fields[2], neg == "true")
            surface = fields[6] if len(fields) == 7 else None
            events.append(ann)
        elif kind == "TIMEX":
            if len(fields) not in (7, 8):
                raise ParseError(lineno, "TIMEX needs 7 or 8 fields", path)
            span = _span(fields[3:5], lineno, path)
            ann = TimexMention(id_, span, fields[2], fields[5], fields[6])
            surface = fields[7] if len(fields) == 8 else None
            timexes.append(ann)
        elif kind == "TLINK":
            if len(fields) != 6:
                raise ParseError(lineno, "TLINK needs 6 fields", path)
            tlinks.append(TLink(id_, fields[2], fields[3], fields[4], fields[5]))
            continue
        else:
            raise ParseError(lineno, f"unknown annotation kind {kind!r}", path)
        if surface is not None:
            expected = text[span.start:span.end]
            if _unescape(surface) != expected:
                raise ValidationError(id_, f"surface {surface!r} does not match text {expected!r}")

    adoc = AnnotatedDocument(
        doc=Document(doc_id, text, meta),
        events=tuple(events),
        timexes=tuple(timexes),
        tlinks=tuple(tlinks),
    )
    return validate(adoc, check_values=check_values)


def read_standoff(path, check_values: bool = True) -> AnnotatedDocument:
    path = Path(path)
    content = path.read_bytes().decode("utf-8")
    return loads_standoff(content, path=path, check_values=check_values)


def iter_corpus(directory, suffix: str = ".ann") -> Iterable[Path]:
    """Standoff files of a directory in deterministic (sorted) order."""
    return sorted(p for p in Path(directory).iterdir() if p.is_file() and p.name.endswith(suffix))
