"""Span matching, attribute accuracy and temporal-link scoring."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

from .corpus import EVENT_CATEGORIES, SECTIME_META
from .tlink.graph import closure_facts, consistent_subset, fact, reduce

TLINK_SUBSETS = {
    "sectime": frozenset({"Sectime"}),
    "intra": frozenset({"Coordinate", "Prepositional", "Other"}),
    "inter": frozenset({"Coref"}),
}


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, other: "Counts") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn

    @property
    def prf(self):
        return prf(self.tp, self.fp, self.fn)


def match_spans(gold, sys, mode: str = "Lenient"):
    """One-to-one matching; returns ``(Counts, [(gold, sys), ...])``.

    Exact matches are paired first in gold order.  In lenient mode each
    remaining gold mention then takes the unmatched system mention with the
    largest character overlap (earliest start on ties).
    """
    if mode not in ("Strict", "Lenient"):
        raise ValueError(f"unknown match mode {mode!r}")
    used = [False] * len(sys)
    pairs = {}
    for gi, g in enumerate(gold):
        for si, s in enumerate(sys):
            if not used[si] and s.span == g.span:
                used[si] = True
                pairs[gi] = si
                break
    if mode == "Lenient":
        for gi, g in enumerate(gold):
            if gi in pairs:
                continue
            best, best_ov = None, 0
            for si, s in enumerate(sys):
                if used[si]:
                    continue
                ov = min(g.span.end, s.span.end) - max(g.span.start, s.span.start)
                if ov > best_ov or (ov == best_ov and ov > 0 and s.span.start < sys[best].span.start):
                    best, best_ov = si, ov
            if best is not None:
                used[best] = True
                pairs[gi] = best
    tp = len(pairs)
    matched = [(gold[g], sys[s]) for g, s in sorted(pairs.items())]
    return Counts(tp, len(sys) - tp, len(gold) - tp), matched


def primary_score(lenient_f1: float, value_accuracy: float) -> float:
    return lenient_f1 * value_accuracy


@dataclass
class TernScores:
    strict: Counts = field(default_factory=Counts)
    lenient: Counts = field(default_factory=Counts)
    matched: int = 0
    type_ok: int = 0
    value_ok: int = 0
    modifier_ok: int = 0

    def add_doc(self, gold, sys) -> None:
        self.strict.add(match_spans(gold, sys, "Strict")[0])
        counts, pairs = match_spans(gold, sys, "Lenient")
        self.lenient.add(counts)
        for g, s in pairs:
            self.matched += 1
            self.type_ok += g.ttype == s.ttype
            self.value_ok += g.value == s.value
            self.modifier_ok += g.modifier == s.modifier

    def accuracy(self, n: int) -> float:
        return n / self.matched if self.matched else 0.0

    @property
    def type_accuracy(self):
        return self.accuracy(self.type_ok)

    @property
    def value_accuracy(self):
        return self.accuracy(self.value_ok)

    @property
    def modifier_accuracy(self):
        return self.accuracy(self.modifier_ok)

    @property
    def primary(self):
        return primary_score(self.lenient.prf[2], self.value_accuracy)


def score_tern(gold, sys) -> TernScores:
    scores = TernScores()
    scores.add_doc(gold, sys)
    return scores


# --- temporal links ---------------------------------------------------------


def link_facts(links, rename=None) -> set:
    rename = rename or {}
    return {fact(rename.get(l.source, l.source), rename.get(l.target, l.target), l.relation)
            for l in links if l.source != l.target}


def customary_counts(gold_facts, sys_facts) -> Counts:
    g, s = set(gold_facts), set(sys_facts)
    return Counts(len(g & s), len(s - g), len(g - s))


def customary_score(gold_links, sys_links):
    return customary_counts(link_facts(gold_links), link_facts(sys_links)).prf


@dataclass
class TempEval3:
    p_num: int = 0
    p_den: int = 0
    r_num: int = 0
    r_den: int = 0
    excluded: int = 0

    def add(self, gold_facts, sys_facts) -> None:
        gold, dropped_g = consistent_subset(gold_facts)
        sys, dropped_s = consistent_subset(sys_facts)
        self.excluded += len(dropped_g) + len(dropped_s)
        rs, rg = reduce(sys), reduce(gold)
        self.p_num += len(rs & closure_facts(gold))
        self.p_den += len(rs)
        self.r_num += len(rg & closure_facts(sys))
        self.r_den += len(rg)

    @property
    def empty(self) -> bool:
        return not self.p_den or not self.r_den

    @property
    def prf(self):
        p = self.p_num / self.p_den if self.p_den else 0.0
        r = self.r_num / self.r_den if self.r_den else 0.0
        return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def tempeval3_score(gold_facts, sys_facts):
    """(P, R): reduced system edges verified in the gold closure, and vice versa."""
    t = TempEval3()
    t.add(gold_facts, sys_facts)
    p, r, _ = t.prf
    return p, r


def anchor_map(gold_adoc, sys_adoc) -> dict:
    """System anchor id -> gold anchor id by lenient span matching."""
    out = {st: st for st in SECTIME_META}
    _, ev_pairs = match_spans(list(gold_adoc.events), list(sys_adoc.events), "Lenient")
    _, tx_pairs = match_spans(list(gold_adoc.timexes), list(sys_adoc.timexes), "Lenient")
    for g, s in ev_pairs + tx_pairs:
        out[s.id] = g.id
    for m in (*sys_adoc.events, *sys_adoc.timexes):
        out.setdefault(m.id, f"sys:{m.id}")
    return out


# --- reports ----------------------------------------------------------------


@dataclass
class EvalReport:
    events: dict = field(default_factory=dict)  # category -> {"strict": Counts, "lenient": Counts}
    tern: TernScores = field(default_factory=TernScores)
    tlink_customary: Counts = field(default_factory=Counts)
    tlink_tempeval3: TempEval3 = field(default_factory=TempEval3)
    documents: int = 0
    missing: list = field(default_factory=list)
    tlink_subset: str | None = None

    def micro(self, mode: str) -> Counts:
        total = Counts()
        for cat in EVENT_CATEGORIES:
            if cat in self.events:
                total.add(self.events[cat][mode])
        return total

    def values(self) -> dict:
        """Flat key -> value mapping; every score lies in [0, 1]."""
        out = {"documents": self.documents, "missing_system_documents": len(self.missing)}
        for cat in EVENT_CATEGORIES:
            for mode in ("strict", "lenient"):
                c = self.events.get(cat, {}).get(mode, Counts())
                for name, v in zip(("precision", "recall", "f1"), c.prf):
                    out[f"event.{cat}.{mode}.{name}"] = v
        for mode in ("strict", "lenient"):
            for name, v in zip(("precision", "recall", "f1"), self.micro(mode).prf):
                out[f"event.micro.{mode}.{name}"] = v
        for mode in ("strict", "lenient"):
            for name, v in zip(("precision", "recall", "f1"), getattr(self.tern, mode).prf):
                out[f"timex.{mode}.{name}"] = v
        out["timex.type_accuracy"] = self.tern.type_accuracy
        out["timex.value_accuracy"] = self.tern.value_accuracy
        out["timex.modifier_accuracy"] = self.tern.modifier_accuracy
        out["timex.primary_score"] = self.tern.primary
        for name, v in zip(("precision", "recall", "f1"), self.tlink_customary.prf):
            out[f"tlink.customary.{name}"] = v
        for name, v in zip(("precision", "recall", "f1"), self.tlink_tempeval3.prf):
            out[f"tlink.tempeval3.{name}"] = v
        out["tlink.tempeval3.excluded_conflicting_edges"] = self.tlink_tempeval3.excluded
        out["tlink.subset"] = self.tlink_subset or "all"
        return out

    def to_tsv(self) -> str:
        return "".join(f"{k}\t{_fmt(v)}\n" for k, v in self.values().items())

    def to_text(self) -> str:
        lines = [f"Documents: {self.documents}" + (f" ({len(self.missing)} missing from system output)"
                                                    if self.missing else ""), "",
                 "EVENT            strict P / R / F1          lenient P / R / F1"]
        for cat in (*EVENT_CATEGORIES, "micro"):
            c = {m: (self.micro(m) if cat == "micro" else self.events.get(cat, {}).get(m, Counts()))
                 for m in ("strict", "lenient")}
            lines.append(f"{cat:<12} " + "   ".join(" / ".join(f"{x:.4f}" for x in c[m].prf)
                                                     for m in ("strict", "lenient")))
        t = self.tern
        lines += ["", "TIMEX3           strict P / R / F1          lenient P / R / F1",
                  "             " + "   ".join(" / ".join(f"{x:.4f}" for x in getattr(t, m).prf)
                                               for m in ("strict", "lenient")),
                  f"type {t.type_accuracy:.4f}   value {t.value_accuracy:.4f}   "
                  f"modifier {t.modifier_accuracy:.4f}   primary {t.primary:.4f}",
                  "", f"TLINK ({self.tlink_subset or 'all'})   P / R / F1",
                  "customary    " + " / ".join(f"{x:.4f}" for x in self.tlink_customary.prf),
                  "TempEval-3   " + " / ".join(f"{x:.4f}" for x in self.tlink_tempeval3.prf)]
        if self.tlink_tempeval3.excluded:
            lines.append(f"({self.tlink_tempeval3.excluded} conflicting edges excluded)")
        return "\n".join(lines) + "\n"

    def write(self, out_dir) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = [out_dir / "report.txt", out_dir / "report.tsv"]
        paths[0].write_text(self.to_text(), encoding="utf-8", newline="\n")
        paths[1].write_text(self.to_tsv(), encoding="utf-8", newline="\n")
        return paths


def _fmt(v) -> str:
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def evaluate(gold_docs: dict, sys_docs: dict, tlink_subset: str | None = None) -> EvalReport:
    """Score system documents against gold documents keyed by document id.

    A gold document without a system counterpart counts every gold annotation
    as a false negative.
    """
    origins = TLINK_SUBSETS[tlink_subset] if tlink_subset else None
    rep = EvalReport(events={c: {"strict": Counts(), "lenient": Counts()} for c in EVENT_CATEGORIES},
                     tlink_subset=tlink_subset)
    for doc_id in sorted(gold_docs):
        gold = gold_docs[doc_id]
        sys = sys_docs.get(doc_id)
        rep.documents += 1
        if sys is None:
            rep.missing.append(doc_id)
            sys = gold.with_annotations(events=(), timexes=(), tlinks=())
        for cat in EVENT_CATEGORIES:
            g = [e for e in gold.events if e.category == cat]
            s = [e for e in sys.events if e.category == cat]
            for mode, key in (("Strict", "strict"), ("Lenient", "lenient")):
                rep.events[cat][key].add(match_spans(g, s, mode)[0])
        rep.tern.add_doc(list(gold.timexes), list(sys.timexes))
        rename = anchor_map(gold, sys)
        g_links = [l for l in gold.tlinks if origins is None or l.origin in origins]
        s_links = [l for l in sys.tlinks if origins is None or l.origin in origins]
        gf, sf = link_facts(g_links), link_facts(s_links, rename)
        rep.tlink_customary.add(customary_counts(gf, sf))
        rep.tlink_tempeval3.add(gf, sf)
    return rep


def report_dict(rep: EvalReport) -> dict:
    return {"values": rep.values(), "events": {c: {m: asdict(v) for m, v in d.items()} for c, d in rep.events.items()}}
