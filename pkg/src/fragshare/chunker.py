"""NP/VP fragment extraction and the frequency-indexed fragment pool.

Two extractors are provided: ``extract_tree`` reads constituency trees
(nested constituents included), ``extract_shallow`` falls back to POS
patterns for tree-less input.  ``build_pool`` indexes fragments by label and
kind and computes per-form document frequencies over the full corpus text,
which ``filter_rare`` uses to drop uniquely linkable constituents.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ParseError, ValidationError
from .match import doc_frequencies, surface
from .model import Corpus, Document, TreeNode, normalize_label

DEFAULT_MIN_LEN = 2
DEFAULT_MAX_LEN = 4

KINDS = ("NP", "VP")


@dataclass(frozen=True)
class Fragment:
    """One extracted NP or VP chunk with source provenance."""

    kind: str
    words: tuple[str, ...]
    doc_id: str
    sent_idx: int
    span: tuple[int, int]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"fragment kind must be NP or VP, got {self.kind!r}")
        start, end = self.span
        if not 0 <= start < end:
            raise ValidationError(f"bad span {self.span}")
        if end - start != len(self.words) or not self.words:
            raise ValidationError("span width must equal the word count")
        if self.sent_idx < 0:
            raise ValidationError("sent_idx must be non-negative")

    @property
    def length(self) -> int:
        return len(self.words)

    @property
    def surface(self) -> str:
        return surface(self.words)


@dataclass(frozen=True)
class FragmentPool:
    """Immutable, index-backed collection of fragments.

    ``doc_freq`` maps each pooled surface form to the number of distinct
    corpus documents containing it as a contiguous, case-insensitive token
    subsequence, computed over the full corpus text rather than over the pool.
    """

    fragments: tuple[Fragment, ...]
    by_label: Mapping[str | None, tuple[int, ...]]
    by_kind: Mapping[str, tuple[int, ...]]
    doc_freq: Mapping[str, int]

    def __len__(self) -> int:
        return len(self.fragments)


def _check_bounds(min_len: int, max_len: int) -> None:
    if not 1 <= min_len <= max_len:
        raise ValidationError(f"bounds must satisfy 1 <= min_len <= max_len, got [{min_len}, {max_len}]")


def _tree_spans_preorder(root: TreeNode) -> list[tuple[TreeNode, int, int]]:
    """Every node with its leaf span, parents before children."""
    out: list[tuple[TreeNode, int, int]] = []

    def visit(node: TreeNode) -> tuple[int, int]:
        slot = len(out)
        out.append((node, -1, -1))
        if node.leaf is not None:
            span = (node.leaf, node.leaf + 1)
        else:
            start = end = None
            for child in node.children:
                c_start, c_end = visit(child)
                start = c_start if start is None else start
                end = c_end
            span = (start, end)  # contiguity guaranteed by tree validation
        out[slot] = (node, span[0], span[1])
        return span

    visit(root)
    return out


def extract_tree(
    doc: Document, min_len: int = DEFAULT_MIN_LEN, max_len: int = DEFAULT_MAX_LEN
) -> list[Fragment]:
    """All NP/VP tree constituents of the requested word length, nested included.

    Order is document order, then top-down (a qualifying outer constituent
    precedes the qualifying constituents nested inside it).
    """
    _check_bounds(min_len, max_len)
    fragments: list[Fragment] = []
    for sent_idx, sent in enumerate(doc.sentences):
        if sent.tree is None:
            raise ValidationError(
                f"document {doc.doc_id!r} has sentences without trees; use extract_shallow for POS-only input"
            )
        for node, start, end in _tree_spans_preorder(sent.tree):
            if node.is_leaf:
                continue
            label = normalize_label(node.label)
            if label in KINDS and min_len <= end - start <= max_len:
                fragments.append(
                    Fragment(
                        kind=label,
                        words=tuple(t.form for t in sent.tokens[start:end]),
                        doc_id=doc.doc_id,
                        sent_idx=sent_idx,
                        span=(start, end),
                    )
                )
    return fragments


# POS-class alphabet for the shallow patterns: one char per token
_TAG_CLASS = {
    "DT": "d",
    "JJ": "j", "JJR": "j", "JJS": "j",
    "NN": "n", "NNS": "n", "NNP": "n", "NNPS": "n",
    "MD": "m",
    "VB": "v", "VBD": "v", "VBG": "v", "VBN": "v", "VBP": "v", "VBZ": "v",
    "RB": "r",
}
_NP_PATTERN = re.compile(r"d?j*n+")
_VP_PATTERN = re.compile(r"m?v+r?(?:d?j*n+)?")


def extract_shallow(
    doc: Document, min_len: int = DEFAULT_MIN_LEN, max_len: int = DEFAULT_MAX_LEN
) -> list[Fragment]:
    """Flat NP/VP chunks from POS patterns (no nesting).

    NP chunks match ``DT? (JJ|JJR|JJS)* (NN|NNS|NNP|NNPS)+``; VP chunks match
    ``MD? (VB|VBD|VBG|VBN|VBP|VBZ)+ RB? NP?``.  Matches are maximal and
    non-overlapping per kind, left to right; the length filter applies after
    matching.
    """
    _check_bounds(min_len, max_len)
    fragments: list[Fragment] = []
    for sent_idx, sent in enumerate(doc.sentences):
        for tok in sent.tokens:
            if tok.pos is None:
                raise ValidationError(f"document {doc.doc_id!r} has tokens without POS tags")
        classes = "".join(_TAG_CLASS.get(t.pos, "x") for t in sent.tokens)
        chunks: list[tuple[int, int, str]] = []
        for kind, pattern in (("NP", _NP_PATTERN), ("VP", _VP_PATTERN)):
            for m in pattern.finditer(classes):
                chunks.append((m.start(), m.end(), kind))
        chunks.sort()
        for start, end, kind in chunks:
            if min_len <= end - start <= max_len:
                fragments.append(
                    Fragment(
                        kind=kind,
                        words=tuple(t.form for t in sent.tokens[start:end]),
                        doc_id=doc.doc_id,
                        sent_idx=sent_idx,
                        span=(start, end),
                    )
                )
    return fragments


def build_pool(corpus: Corpus, fragments: Iterable[Fragment]) -> FragmentPool:
    """Index fragments and compute document frequencies over the full corpus."""
    frags = tuple(fragments)
    labels = {d.doc_id: d.label for d in corpus.documents}
    for frag in frags:
        if frag.doc_id not in labels:
            raise ValidationError(f"fragment references unknown document {frag.doc_id!r}")
    by_label: dict[str | None, list[int]] = {}
    by_kind: dict[str, list[int]] = {}
    for i, frag in enumerate(frags):
        by_label.setdefault(labels[frag.doc_id], []).append(i)
        by_kind.setdefault(frag.kind, []).append(i)
    doc_freq = doc_frequencies(corpus, {f.surface for f in frags})
    return FragmentPool(
        fragments=frags,
        by_label={k: tuple(v) for k, v in by_label.items()},
        by_kind={k: tuple(v) for k, v in by_kind.items()},
        doc_freq=doc_freq,
    )


def filter_rare(pool: FragmentPool, min_doc_freq: int) -> FragmentPool:
    """Keep only fragments whose surface form occurs in >= min_doc_freq documents.

    Returns a new pool with rebuilt indexes; the input pool is unchanged.
    """
    if min_doc_freq < 1:
        raise ValidationError("min_doc_freq must be a positive integer")
    keep = [i for i, f in enumerate(pool.fragments) if pool.doc_freq[f.surface] >= min_doc_freq]
    remap = {old: new for new, old in enumerate(keep)}
    frags = tuple(pool.fragments[i] for i in keep)
    by_label = {
        label: tuple(remap[i] for i in idxs if i in remap)
        for label, idxs in pool.by_label.items()
    }
    by_kind = {
        kind: tuple(remap[i] for i in idxs if i in remap)
        for kind, idxs in pool.by_kind.items()
    }
    doc_freq = {f.surface: pool.doc_freq[f.surface] for f in frags}
    return FragmentPool(fragments=frags, by_label=by_label, by_kind=by_kind, doc_freq=doc_freq)


def write_fragments(pool: FragmentPool) -> str:
    """Fragment dump, one JSON object per line (for inspection and hand-off)."""
    lines = []
    for frag in pool.fragments:
        lines.append(
            json.dumps(
                {
                    "kind": frag.kind,
                    "words": list(frag.words),
                    "doc_id": frag.doc_id,
                    "sent_idx": frag.sent_idx,
                    "span": list(frag.span),
                    "doc_freq": pool.doc_freq[frag.surface],
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n" if lines else ""


def read_fragments(source: str | Iterable[str]) -> list[Fragment]:
    """Parse a fragment dump back into Fragment records (doc_freq is ignored)."""
    if isinstance(source, str):
        source = source.splitlines()
    fragments = []
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            fragments.append(
                Fragment(
                    kind=rec["kind"],
                    words=tuple(rec["words"]),
                    doc_id=rec["doc_id"],
                    sent_idx=rec["sent_idx"],
                    span=tuple(rec["span"]),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"bad fragment record: {exc}", lineno) from exc
    return fragments
