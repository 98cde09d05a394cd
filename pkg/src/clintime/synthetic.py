"""Template-generated clinical notes with gold events, timexes and links.

Every surface form comes from fixed vocabularies, so a sequence model can
learn the mentions from lexical cues alone.  Values are computed with plain
calendar arithmetic relative to the admission (or record) date.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from datetime import date, timedelta

from .corpus import (
    ST_ADMISSION, ST_DCT, ST_DISCHARGE, AnnotatedDocument, Document, EventMention, Span, TimexMention,
    TLink,
)

PROBLEMS = (
    "chest pain", "fever", "nausea", "vomiting", "headache", "shortness of breath", "pneumonia",
    "hypertension", "abdominal pain", "cough", "diarrhea", "dizziness", "rash", "back pain", "anemia",
    "atrial fibrillation", "swelling", "fatigue",
)
TREATMENTS = (
    "aspirin", "ibuprofen", "metoprolol", "antibiotics", "steroids", "heparin", "insulin", "morphine",
    "lisinopril", "furosemide", "physical therapy", "warfarin",
)
TESTS = ("chest x-ray", "CT scan", "ECG", "blood culture", "MRI", "echocardiogram", "urinalysis", "CBC")
ROUTINE = ("blood pressure", "weight", "heart rate", "temperature")
MONTH_NAMES = ("January", "February", "March", "April", "May", "June", "July", "August",
               "September", "October", "November", "December")
NUMBER_WORDS = ("one", "two", "three", "four", "five", "six", "seven")

# slot kinds: P/T/X events, D explicit date, R relative date, U duration, F frequency, M routine test
HISTORY_TEMPLATES = (
    ("The patient reported {P1}, {P2} and {P3}.", [("P1", "P2", "Overlap", "Coordinate"), ("P2", "P3", "Overlap", "Coordinate")]),
    ("She developed {P1} {R1}.", []),
    ("He noted {P1} and {P2} {R1}.", [("P1", "P2", "Overlap", "Coordinate")]),
    ("She denies {P1} and {P2}.", [("P1", "P2", "Overlap", "Coordinate")]),
    ("The patient took {T1} for {P1} {R1}.", [("T1", "P1", "Before", "Prepositional")]),
    ("{P1} began {R1} and has persisted for {U1}.", []),
    ("The {X1} showed {P1}.", [("X1", "P1", "Before", "Other")]),
    ("There was no {P1} or {P2}.", [("P1", "P2", "Overlap", "Coordinate")]),
    ("The patient is otherwise comfortable.", []),
    ("Family history is noncontributory.", []),
)
COURSE_TEMPLATES = (
    ("The patient received {T1} for {P1} in {D1}.", [("T1", "P1", "Before", "Prepositional"), ("P1", "D1", "Overlap", "Prepositional")]),
    ("{T1} on {D1} was well tolerated.", [("T1", "D1", "Overlap", "Prepositional")]),
    ("The {X1} on {D1} was unremarkable.", [("X1", "D1", "Overlap", "Prepositional")]),
    ("The {X1} revealed {P1}.", [("X1", "P1", "Before", "Other")]),
    ("She was started on {T1} {F1} for {U1}.", []),
    ("{P1} after {T1} resolved quickly.", [("P1", "T1", "After", "Prepositional")]),
    ("{T1} post {X1} was uneventful.", [("T1", "X1", "After", "Prepositional")]),
    ("She required {T1} for {P1}.", [("T1", "P1", "Before", "Prepositional")]),
    ("He was discharged on {T1} {F1}.", []),
    ("Pulmonary artery pressure was 42/21 and stable.", []),
    ("Please call the clinic at 617-555-0134 with questions.", []),
    ("The patient ambulated without difficulty.", []),
)
RECORD_TEMPLATES = (
    ("Her {M1} was stable.", []),
    ("His {M1} was recorded.", []),
    ("The patient reported {P1} and {P2}.", [("P1", "P2", "Overlap", "Coordinate")]),
    ("She takes {T1} {F1} for {P1}.", []),
    ("The {X1} showed {P1}.", [("X1", "P1", "Before", "Other")]),
    ("He denies {P1}.", []),
)
_SLOT = re.compile(r"\{([A-Z])(\d)\}")
_DETERMINER = re.compile(r"(?:^|\s)((?:the|his|her|a|an) )$", re.IGNORECASE)
_NEGATING = re.compile(r"\b(denies|no)\b", re.IGNORECASE)


def _fmt_slash(d: date) -> str:
    return f"{d.month:02d}/{d.day:02d}/{d.year}"


def _explicit_date(rng, anchor, lo, hi):
    d = anchor + timedelta(days=rng.randint(lo, hi))
    if rng.random() < 0.5:
        return _fmt_slash(d), "Date", d.isoformat()
    return f"{MONTH_NAMES[d.month - 1]} {d.day}, {d.year}", "Date", d.isoformat()


def _relative(rng, anchor):
    choice = rng.randrange(4)
    if choice == 0:
        return "yesterday", "Date", (anchor - timedelta(days=1)).isoformat()
    if choice == 1:
        return "today", "Date", anchor.isoformat()
    n = rng.randint(2, 6)
    word = NUMBER_WORDS[n - 1] if choice == 2 else str(n)
    return f"{word} days ago", "Date", (anchor - timedelta(days=n)).isoformat()


def _duration(rng):
    n = rng.randint(2, 6)
    unit, letter = rng.choice((("days", "D"), ("weeks", "W"), ("months", "M")))
    word = NUMBER_WORDS[n - 1] if rng.random() < 0.5 else str(n)
    return f"{word} {unit}", "Duration", f"P{n}{letter}"


def _frequency(rng):
    return rng.choice((
        ("twice daily", "Frequency", "RP12H"), ("bid", "Frequency", "RP12H"), ("daily", "Frequency", "RP24H"),
        ("q6h", "Frequency", "RP6H"), ("every morning", "Frequency", "RP24H"),
        ("three times a day", "Frequency", "RP8H"), ("qd", "Frequency", "RP24H"),
    ))


@dataclass
class _Builder:
    text: str = ""
    events: list = None
    timexes: list = None
    links: list = None

    def __post_init__(self):
        self.events, self.timexes, self.links = [], [], []

    def add(self, s: str) -> None:
        self.text += s

    def mention(self, s: str) -> Span:
        start = len(self.text)
        self.text += s
        return Span(start, len(self.text))


def _fill(b: _Builder, rng, template, links, anchor, section_lo, section_hi):
    """Append one templated sentence; returns the event ids it created."""
    used_words = set()
    slot_ids = {}
    negated = bool(_NEGATING.search(template))
    created = []
    pos = 0
    cap = template[0] == "{"
    for m in _SLOT.finditer(template):
        b.add(template[pos:m.start()])
        pos = m.end()
        kind, key = m[1], m[1] + m[2]
        if kind in "PTXM":
            vocab = {"P": PROBLEMS, "T": TREATMENTS, "X": TESTS, "M": ROUTINE}[kind]
            word = rng.choice([w for w in vocab if w not in used_words])
            used_words.add(word)
            if cap and m.start() == 0:
                word = word[0].upper() + word[1:]
            span = b.mention(word)
            det = _DETERMINER.search(b.text, 0, span.start)
            if det:
                # annotation convention: a directly preceding article or possessive is part of the concept
                span = Span(det.start(1), span.end)
            cat = {"P": "Problem", "T": "Treatment", "X": "Test", "M": "Test"}[kind]
            ev = EventMention(f"E{len(b.events) + 1}", span, cat, negated and kind == "P")
            b.events.append(ev)
            slot_ids[key] = ev.id
            created.append(ev.id)
        else:
            if kind == "D":
                surface, ttype, value = _explicit_date(rng, anchor, section_lo, section_hi)
            elif kind == "R":
                surface, ttype, value = _relative(rng, anchor)
            elif kind == "U":
                surface, ttype, value = _duration(rng)
            else:
                surface, ttype, value = _frequency(rng)
            span = b.mention(surface)
            tx = TimexMention(f"T{len(b.timexes) + 1}", span, ttype, value)
            b.timexes.append(tx)
            slot_ids[key] = tx.id
    b.add(template[pos:])
    for a, c, rel, origin in links:
        b.links.append((slot_ids[a], slot_ids[c], rel, origin))
    return created


def generate_document(doc_id: str, rng: random.Random, sentences=(4, 8), record_only: bool | None = None) -> AnnotatedDocument:
    if record_only is None:
        record_only = rng.random() < 0.25
    b = _Builder()
    base = date(2008, 1, 1) + timedelta(days=rng.randint(0, 1500))
    sectime = []
    if record_only:
        meta = {"dct": base.isoformat()}
        b.add("Record Date: ")
        b.timexes.append(TimexMention("T1", b.mention(_fmt_slash(base)), "Date", base.isoformat()))
        b.add("\n\n")
        for _ in range(rng.randint(*sentences)):
            tpl, links = rng.choice(RECORD_TEMPLATES)
            created = _fill(b, rng, tpl, links, base, -3, 0)
            b.add(" ")
            for eid in created:
                ev = next(e for e in b.events if e.id == eid)
                routine = b.text[ev.span.start:ev.span.end].lower() in ROUTINE
                sectime.append((eid, ST_DCT, "Overlap" if routine else "Before", "Sectime"))
        b.text = b.text.rstrip(" ") + "\n"
    else:
        stay = rng.randint(3, 12)
        discharge = base + timedelta(days=stay)
        meta = {"admission": base.isoformat(), "discharge": discharge.isoformat()}
        for label, d in (("Admission Date: ", base), ("Discharge Date: ", discharge)):
            b.add(label)
            b.timexes.append(TimexMention(f"T{len(b.timexes) + 1}", b.mention(_fmt_slash(d)), "Date", d.isoformat()))
            b.add("\n")
        sectime.append((ST_ADMISSION, ST_DISCHARGE, "Before", "Sectime"))
        for header, templates, anchor, lo, hi in (
            ("HISTORY OF PRESENT ILLNESS:", HISTORY_TEMPLATES, base, -10, -1),
            ("HOSPITAL COURSE:", COURSE_TEMPLATES, base, 0, stay),
        ):
            b.add(f"\n{header}\n")
            target = ST_ADMISSION if templates is HISTORY_TEMPLATES else ST_DISCHARGE
            for _ in range(rng.randint(*sentences)):
                tpl, links = rng.choice(templates)
                for eid in _fill(b, rng, tpl, links, anchor, lo, hi):
                    sectime.append((eid, target, "Before", "Sectime"))
                b.add(" ")
            b.text = b.text.rstrip(" ") + "\n"
    tlinks, seen = [], set()
    for src, tgt, rel, origin in b.links + sectime:
        if frozenset((src, tgt)) in seen:
            continue
        seen.add(frozenset((src, tgt)))
        tlinks.append(TLink(f"L{len(tlinks) + 1}", src, tgt, rel, origin))
    return AnnotatedDocument(Document(doc_id, b.text, meta), (), tuple(b.events), tuple(b.timexes), tuple(tlinks))


def generate_corpus(n_docs: int, seed: int = 0, sentences=(4, 8)) -> list[AnnotatedDocument]:
    rng = random.Random(seed)
    return [generate_document(f"synth-{i:04d}", rng, sentences) for i in range(1, n_docs + 1)]
