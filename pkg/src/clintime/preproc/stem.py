from functools import lru_cache

from nltk.stem.porter import PorterStemmer

_porter = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Porter stem, reapplied until it stops changing.

    A single Porter pass is not idempotent ("agreed" -> "agre" -> "agr"),
    so the fixpoint is returned instead.
    """
    current = word.lower()
    while True:
        nxt = _porter.stem(current)
        if nxt == current:
            return current
        current = nxt
