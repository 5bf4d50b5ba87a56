"""Core corpus model: tokens, constituency trees, sentences, documents.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ValidationError

LABELS = ("case", "control")


def normalize_label(label: str) -> str:
    """Strip PTB function tags and coindexation from a constituent label.

    ``NP-SBJ`` and ``NP=2`` both normalize to ``NP``.  Labels that *start*
    with ``-`` (``-NONE-``, ``-LRB-``) are left unchanged.
    """
    if not label or label[0] in "-=":
        return label
    for i, ch in enumerate(label):
        if ch in "-=":
            return label[:i]
    return label


@dataclass(frozen=True)
class Token:
    """A single pre-tokenized word, optionally with a Penn-style POS tag."""

    form: str
    pos: str | None = None

    def __post_init__(self):
        if not self.form:
            raise ValidationError("token form must be non-empty")
        if any(ch.isspace() for ch in self.form):
            raise ValidationError(f"token form contains whitespace: {self.form!r}")
        if self.pos is not None and not self.pos:
            raise ValidationError("POS tag, when present, must be non-empty")


@dataclass(frozen=True)
class TreeNode:
    """A constituency-tree node: either internal (children) or a leaf index."""

    label: str
    children: tuple[TreeNode, ...] = ()
    leaf: int | None = None

    def __post_init__(self):
        if self.leaf is not None and self.children:
            raise ValidationError(f"node {self.label!r} has both children and a leaf index")
        if self.leaf is None and not self.children:
            raise ValidationError(f"node {self.label!r} has zero children")
        if self.leaf is not None and self.leaf < 0:
            raise ValidationError("leaf index must be non-negative")

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None

    def iter_nodes(self) -> Iterator[TreeNode]:
        """All nodes in pre-order (a node before its children)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> Iterator[int]:
        """Leaf indices in left-to-right order."""
        for node in self.iter_nodes():
            if node.leaf is not None:
                yield node.leaf


def validate_tree(root: TreeNode, n_tokens: int) -> None:
    """Check that a tree's leaves cover exactly ``0..n_tokens`` in order.

    An in-order leaf sequence equal to ``range(n_tokens)`` also guarantees
    that every subtree spans a contiguous token interval (laminar spans).
    """
    leaves = list(root.leaves())
    if leaves != list(range(n_tokens)):
        raise ValidationError(
            f"tree leaves {leaves} do not cover 0..{n_tokens} in order"
        )


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    tree: TreeNode | None = None

    def __post_init__(self):
        if not self.tokens:
            raise ValidationError("sentence must have at least one token")
        if self.tree is not None:
            validate_tree(self.tree, len(self.tokens))

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]


@dataclass(frozen=True)
class Document:
    """A labeled source text: ordered sentences plus an optional binary label."""

    doc_id: str
    label: str | None
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        if not self.doc_id or any(ch.isspace() for ch in self.doc_id):
            raise ValidationError(f"bad doc_id: {self.doc_id!r}")
        if self.label is not None and self.label not in LABELS:
            raise ValidationError(f"label must be one of {LABELS} or None, got {self.label!r}")
        if not self.sentences:
            raise ValidationError(f"document {self.doc_id!r} has no sentences")

    def token_forms(self) -> list[str]:
        """All token forms in document order, sentences flattened."""
        out: list[str] = []
        for sent in self.sentences:
            out.extend(t.form for t in sent.tokens)
        return out

    def n_words(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen: set[str] = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise ValidationError(f"duplicate doc_id: {doc.doc_id!r}")
            seen.add(doc.doc_id)

    @property
    def label_counts(self) -> dict[str | None, int]:
        counts: Counter[str | None] = Counter(d.label for d in self.documents)
        return dict(counts)

    def labels(self) -> list[str]:
        """Distinct non-None labels, sorted."""
        return sorted({d.label for d in self.documents if d.label is not None})

    def doc_map(self) -> dict[str, Document]:
        return {d.doc_id: d for d in self.documents}

    def __len__(self) -> int:
        return len(self.documents)
