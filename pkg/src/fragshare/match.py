"""Case-insensitive contiguous token-subsequence matching against documents.

Shared by fragment pooling (document frequencies) and the linkage audit
(k-anonymity counts) so that both sides apply the identical adversary model:
exact lowercased token n-gram containment, sentence boundaries flattened.
"""

from __future__ import annotations

from typing import Collection, Iterable

from .model import Corpus


def surface(words: Iterable[str]) -> str:
    """Canonical surface form: lowercased, single-space joined."""
    return " ".join(w.lower() for w in words)


def doc_matches(corpus: Corpus, forms: Collection[str]) -> dict[str, set[str]]:
    """Map each form to the set of doc_ids containing it as a token n-gram.

    Forms must already be canonical (see :func:`surface`).  Matching treats
    each document as one flat token sequence.
    """
    by_length: dict[int, set[str]] = {}
    for form in forms:
        by_length.setdefault(form.count(" ") + 1, set()).add(form)
    found: dict[str, set[str]] = {form: set() for form in forms}
    for doc in corpus.documents:
        toks = [t.lower() for t in doc.token_forms()]
        for n, wanted in by_length.items():
            for i in range(len(toks) - n + 1):
                gram = " ".join(toks[i : i + n])
                if gram in wanted:
                    found[gram].add(doc.doc_id)
    return found


def doc_frequencies(corpus: Corpus, forms: Collection[str]) -> dict[str, int]:
    """Distinct-document counts for each form (see :func:`doc_matches`)."""
    return {form: len(ids) for form, ids in doc_matches(corpus, forms).items()}
