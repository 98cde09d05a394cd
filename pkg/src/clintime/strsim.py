"""SoftTFIDF string similarity with a Jaro-Winkler inner metric."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyCorpus

_TOKEN = re.compile(r"\w+")


def jaro(a: str, b: str) -> float:
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if not la or not lb:
        return 0.0
    window = max(max(la, lb) // 2 - 1, 0)
    used = [False] * lb
    a_hits = []
    for i, ch in enumerate(a):
        for j in range(max(0, i - window), min(lb, i + window + 1)):
            if not used[j] and b[j] == ch:
                used[j] = True
                a_hits.append(ch)
                break
    m = len(a_hits)
    if not m:
        return 0.0
    b_hits = [b[j] for j in range(lb) if used[j]]
    t = sum(x != y for x, y in zip(a_hits, b_hits)) / 2
    return (m / la + m / lb + (m - t) / m) / 3


def jaro_winkler(a: str, b: str, scale: float = 0.1, max_prefix: int = 4, boost_threshold: float = 0.7) -> float:
    j = jaro(a, b)
    if j <= boost_threshold:
        return j
    prefix = 0
    for x, y in zip(a[:max_prefix], b[:max_prefix]):
        if x != y:
            break
        prefix += 1
    return j + prefix * scale * (1 - j)


def tokens(s: str) -> list[str]:
    return _TOKEN.findall(s.lower())


@dataclass(frozen=True)
class TfidfCorpusStats:
    doc_count: int
    token_doc_freq: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.doc_count < 1:
            raise EmptyCorpus("TF-IDF statistics need at least one document")

    def df(self, token: str) -> int:
        return self.token_doc_freq.get(token, 1)


@dataclass(frozen=True)
class SoftTfidfParams:
    inner_threshold: float = 0.9

    def __post_init__(self):
        if not 0 < self.inner_threshold <= 1:
            raise ValueError("inner_threshold must lie in (0, 1]")


def build_stats(strings) -> TfidfCorpusStats:
    strings = list(strings)
    if not strings:
        raise EmptyCorpus("cannot build TF-IDF statistics from an empty list")
    df = Counter()
    for s in strings:
        df.update(set(tokens(s)))
    return TfidfCorpusStats(len(strings), dict(df))


def _weights(toks, stats, use_idf: bool) -> dict:
    tf = Counter(toks)
    raw = {w: (math.log(n) + 1) * (math.log(stats.doc_count / stats.df(w)) if use_idf else 1.0)
           for w, n in tf.items()}
    norm = math.sqrt(sum(v * v for v in raw.values()))
    return {w: v / norm for w, v in raw.items()} if norm > 0 else {}


def _directed(vs, vt, threshold) -> float:
    total = 0.0
    partners = sorted(vt)
    for w, weight in vs.items():
        best, best_sim = None, -1.0
        for u in partners:
            sim = 1.0 if u == w else jaro_winkler(w, u)
            if sim > best_sim:
                best, best_sim = u, sim
        if best is not None and best_sim >= threshold:
            total += weight * vt[best] * best_sim
    return total


def soft_tfidf(s: str, t: str, stats: TfidfCorpusStats, params: SoftTfidfParams | None = None) -> float:
    """Symmetrized SoftTFIDF in [0, 1].

    Weights fall back to plain log-TF when the IDF makes either vector zero
    (e.g. every token occurs in every document).
    """
    params = params or SoftTfidfParams()
    ts, tt = tokens(s), tokens(t)
    if not ts or not tt:
        return 0.0
    vs, vt = _weights(ts, stats, True), _weights(tt, stats, True)
    if not vs or not vt:
        vs, vt = _weights(ts, stats, False), _weights(tt, stats, False)
    score = (_directed(vs, vt, params.inner_threshold) + _directed(vt, vs, params.inner_threshold)) / 2
    return min(1.0, max(0.0, score))
