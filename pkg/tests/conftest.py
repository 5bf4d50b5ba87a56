"""Shared fixtures and independent test oracles.

The brute-force helpers here deliberately avoid the library's extraction and
matching code paths: they re-derive expected values from the raw model types
so the tests stay independent of what they check.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from fragshare.model import Corpus, Document, TreeNode
from fragshare.synthetic import SynthSpec, generate_synthetic

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def synth_200() -> Corpus:
    """The 200-document reference corpus used across tests (seed 42, 10% case)."""
    return generate_synthetic(SynthSpec(n_docs=200, seed=42, case_fraction=0.10))


# --- independent oracles ----------------------------------------------------


def brute_force_np_vp(doc: Document, min_len: int = 2, max_len: int = 4):
    """Enumerate qualifying NP/VP nodes without the chunker's span machinery.

    Returns a set of (kind, words, sent_idx, span) tuples.
    """

    def strip(label: str) -> str:
        if label.startswith(("-", "=")):
            return label
        out = label
        for sep in "-=":
            out = out.split(sep)[0]
        return out

    def leaf_indices(node: TreeNode) -> list[int]:
        if node.leaf is not None:
            return [node.leaf]
        out = []
        for child in node.children:
            out.extend(leaf_indices(child))
        return out

    found = set()

    def walk(node: TreeNode, sent_idx: int, forms: list[str]):
        if node.leaf is not None:
            return
        idx = leaf_indices(node)
        kind = strip(node.label)
        if kind in ("NP", "VP") and min_len <= len(idx) <= max_len:
            span = (min(idx), max(idx) + 1)
            found.add((kind, tuple(forms[i] for i in idx), sent_idx, span))
        for child in node.children:
            walk(child, sent_idx, forms)

    for sent_idx, sent in enumerate(doc.sentences):
        assert sent.tree is not None
        walk(sent.tree, sent_idx, [t.form for t in sent.tokens])
    return found


def brute_force_doc_count(corpus: Corpus, form: str) -> int:
    """Distinct documents containing `form` as a lowercased token n-gram."""
    words = tuple(form.lower().split(" "))
    n = len(words)
    count = 0
    for doc in corpus.documents:
        toks = [t.lower() for t in doc.token_forms()]
        if any(tuple(toks[i : i + n]) == words for i in range(len(toks) - n + 1)):
            count += 1
    return count


def brute_force_doc_counts(corpus: Corpus, forms) -> dict[str, int]:
    """Like brute_force_doc_count for many forms, using per-document n-gram sets."""
    lengths = {f.count(" ") + 1 for f in forms}
    wanted = {f: 0 for f in forms}
    for doc in corpus.documents:
        toks = [t.lower() for t in doc.token_forms()]
        grams = set()
        for n in lengths:
            for i in range(len(toks) - n + 1):
                grams.add(" ".join(toks[i : i + n]))
        for f in wanted:
            if f in grams:
                wanted[f] += 1
    return wanted
