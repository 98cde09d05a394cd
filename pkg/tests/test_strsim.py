import math
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from clintime.errors import EmptyCorpus
from clintime.strsim import SoftTfidfParams, build_stats, jaro_winkler, soft_tfidf

CORPUS = ["severe stomach ache", "stomach ache", "chest pain", "headache", "ibuprofen"]


def ref_jw(s, t):
    """Textbook Jaro-Winkler, written independently of the library."""
    if s == t:
        return 1.0
    if not s or not t:
        return 0.0
    rng = max(len(s), len(t)) // 2 - 1
    s_flag, t_flag = [False] * len(s), [False] * len(t)
    m = 0
    for i in range(len(s)):
        lo, hi = max(0, i - rng), min(i + rng + 1, len(t))
        for j in range(lo, hi):
            if not t_flag[j] and s[i] == t[j]:
                s_flag[i] = t_flag[j] = True
                m += 1
                break
    if m == 0:
        return 0.0
    k = trans = 0
    for i in range(len(s)):
        if s_flag[i]:
            while not t_flag[k]:
                k += 1
            if s[i] != t[k]:
                trans += 1
            k += 1
    j = (m / len(s) + m / len(t) + (m - trans / 2) / m) / 3
    if j <= 0.7:
        return j
    p = 0
    while p < min(4, len(s), len(t)) and s[p] == t[p]:
        p += 1
    return j + 0.1 * p * (1 - j)


def ref_soft_tfidf(s, t, corpus, theta=0.9):
    docs = [set(c.lower().split()) for c in corpus]
    n = len(docs)

    def vec(x):
        tf = Counter(x.lower().split())
        raw = {w: (math.log(c) + 1) * math.log(n / max(1, sum(w in d for d in docs))) for w, c in tf.items()}
        z = math.sqrt(sum(v * v for v in raw.values()))
        return {w: v / z for w, v in raw.items()}

    def one_way(a, b):
        total = 0.0
        for w, vw in a.items():
            sims = [(ref_jw(w, u), u) for u in b]
            best, u = max(sims, key=lambda p: p[0])
            if best >= theta:
                total += vw * b[u] * best
        return total

    vs, vt = vec(s), vec(t)
    return (one_way(vs, vt) + one_way(vt, vs)) / 2


@pytest.mark.parametrize("a, b, expected", [
    ("abc", "abc", 1.0), ("abc", "xyz", 0.0), ("MARTHA", "MARHTA", 0.9611),
    ("DWAYNE", "DUANE", 0.84), ("DIXON", "DICKSONX", 0.8133),
])
def test_jaro_winkler_values(a, b, expected):
    assert jaro_winkler(a, b) == pytest.approx(expected, abs=1e-4)


@given(st.text(alphabet="abcdeMARTH", max_size=10), st.text(alphabet="abcdeMARTH", max_size=10))
def test_jaro_winkler_matches_reference_and_is_symmetric(a, b):
    assert jaro_winkler(a, b) == pytest.approx(ref_jw(a, b), abs=1e-12)
    assert jaro_winkler(a, b) == pytest.approx(jaro_winkler(b, a), abs=1e-12)


def test_build_stats():
    st_ = build_stats(["a b", "a c"])
    assert st_.doc_count == 2 and st_.df("a") == 2 and st_.df("b") == 1
    assert set(build_stats(["x y z"]).token_doc_freq.values()) == {1}
    assert build_stats(["a", "a", "b"]).df("a") == 2
    with pytest.raises(EmptyCorpus):
        build_stats([])


def test_reference_value():
    stats = build_stats(CORPUS)
    got = soft_tfidf("severe stomach ache", "stomach ache", stats)
    assert got == pytest.approx(ref_soft_tfidf("severe stomach ache", "stomach ache", CORPUS), abs=1e-12)
    assert got == pytest.approx(0.62714, abs=1e-5)


def test_identity_and_disjoint():
    stats = build_stats(CORPUS)
    assert soft_tfidf("chest pain", "chest pain", stats) == pytest.approx(1.0, abs=1e-9)
    assert soft_tfidf("chest pain", "ibuprofen", stats) == 0.0


def test_tf_fallback_when_every_token_is_common():
    stats = build_stats(["chest pain", "chest pain"])
    assert soft_tfidf("chest pain", "chest pain", stats) == pytest.approx(1.0)


words = st.lists(st.sampled_from(["pain", "pains", "chest", "chst", "ache", "headache", "fever", "fevers"]),
                 min_size=1, max_size=4).map(" ".join)


@given(words, words, st.floats(min_value=0.5, max_value=0.95))
def test_range_identity_monotone(s, t, theta):
    stats = build_stats(CORPUS + [s, t])
    low = soft_tfidf(s, t, stats, SoftTfidfParams(theta))
    high = soft_tfidf(s, t, stats, SoftTfidfParams(min(1.0, theta + 0.05)))
    assert 0.0 <= low <= 1.0
    assert high <= low + 1e-12
    assert soft_tfidf(s, s, stats) == pytest.approx(1.0, abs=1e-9)


def test_fuzz_range():
    rng = random.Random(2)
    alphabet = "abcde "
    strings = ["".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12))) for _ in range(400)]
    stats = build_stats(strings)
    for _ in range(2000):
        s, t = rng.choice(strings), rng.choice(strings)
        assert 0.0 <= soft_tfidf(s, t, stats) <= 1.0
