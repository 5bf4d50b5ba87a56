"""Corpus readers and writers.

Three formats are supported:

* bracketed: record header ``#doc <doc_id> [label]`` followed by one
  S-expression constituency tree per line;
* tagged: same header, sentences as inline ``form/POS`` pairs or as
  tab-separated two-column blocks with blank-line sentence breaks;
* canonical: one JSON object per line holding tokens, POS tags, and the
  tree rendered back to bracketed text.

Tokenization is delegated to the input: the toolkit never re-tokenizes.
"""

from __future__ import annotations

import json
import re
from typing import Iterable, Iterator

from .errors import ParseError, ValidationError
from .model import Corpus, Document, LABELS, Sentence, Token, TreeNode, normalize_label

_SEXPR_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")

_FORM_DECODE = {"-LRB-": "(", "-RRB-": ")"}
_FORM_ENCODE = {"(": "-LRB-", ")": "-RRB-"}


def _decode_form(form: str) -> str:
    return _FORM_DECODE.get(form, form)


def _encode_form(form: str) -> str:
    return _FORM_ENCODE.get(form, form)


def _as_lines(source: str | Iterable[str]) -> Iterator[str]:
    if isinstance(source, str):
        return iter(source.splitlines())
    return (line.rstrip("\n") for line in source)


def _parse_header(line: str, lineno: int) -> tuple[str, str | None]:
    parts = line.split()
    if parts[0] != "#doc":
        raise ParseError(f"expected '#doc' header, got {parts[0]!r}", lineno)
    if len(parts) < 2:
        raise ParseError("header is missing a doc_id", lineno)
    if len(parts) > 3:
        raise ParseError("header has trailing fields (expected '#doc <doc_id> [label]')", lineno)
    doc_id = parts[1]
    label = parts[2] if len(parts) == 3 else None
    if label is not None and label not in LABELS:
        raise ParseError(f"unknown label {label!r} (expected one of {LABELS})", lineno)
    return doc_id, label


def parse_tree_line(line: str, lineno: int | None = None) -> tuple[TreeNode, tuple[Token, ...]]:
    """Parse one S-expression tree; returns the root and its tokens.

    Constituent labels are normalized (``NP-SBJ`` -> ``NP``) and escaped
    brackets in token forms are decoded (``-LRB-`` -> ``(``).
    """
    toks = _SEXPR_TOKEN_RE.findall(line)
    tokens: list[Token] = []
    pos = 0

    def parse_node() -> TreeNode:
        nonlocal pos
        if pos >= len(toks) or toks[pos] != "(":
            raise ParseError("expected '('", lineno)
        pos += 1
        if pos >= len(toks) or toks[pos] in ("(", ")"):
            raise ParseError("missing node label", lineno)
        label = normalize_label(toks[pos])
        pos += 1
        if pos >= len(toks):
            raise ParseError("unbalanced parentheses", lineno)
        if toks[pos] == "(":
            children = []
            while pos < len(toks) and toks[pos] == "(":
                children.append(parse_node())
            if pos >= len(toks) or toks[pos] != ")":
                raise ParseError("unbalanced parentheses", lineno)
            pos += 1
            return TreeNode(label, tuple(children))
        if toks[pos] == ")":
            raise ParseError(f"node {label!r} has zero children", lineno)
        # preterminal: (POS word)
        form = _decode_form(toks[pos])
        pos += 1
        if pos >= len(toks):
            raise ParseError("unbalanced parentheses", lineno)
        if toks[pos] != ")":
            raise ParseError("expected ')' after leaf word", lineno)
        pos += 1
        try:
            tokens.append(Token(form=form, pos=label))
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from exc
        return TreeNode(label, leaf=len(tokens) - 1)

    root = parse_node()
    if pos != len(toks):
        raise ParseError("trailing content after tree", lineno)
    return root, tuple(tokens)


def parse_bracketed(source: str | Iterable[str]) -> Corpus:
    """Parse bracketed-tree records into a Corpus."""
    documents: list[Document] = []
    seen: set[str] = set()
    current: tuple[str, str | None, int] | None = None
    sentences: list[Sentence] = []

    def flush():
        if current is None:
            return
        doc_id, label, header_line = current
        if not sentences:
            raise ValidationError(f"document {doc_id!r} has an empty body (header at line {header_line})")
        documents.append(Document(doc_id=doc_id, label=label, sentences=tuple(sentences)))

    for lineno, raw in enumerate(_as_lines(source), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            flush()
            sentences = []
            doc_id, label = _parse_header(line, lineno)
            if doc_id in seen:
                raise ValidationError(f"duplicate doc_id: {doc_id!r} (line {lineno})")
            seen.add(doc_id)
            current = (doc_id, label, lineno)
        else:
            if current is None:
                raise ParseError("tree data before any '#doc' header", lineno)
            tree, tokens = parse_tree_line(line, lineno)
            sentences.append(Sentence(tokens=tokens, tree=tree))
    flush()
    return Corpus(tuple(documents))


def _parse_inline_sentence(line: str, lineno: int) -> Sentence:
    tokens = []
    for i, item in enumerate(line.split(), 1):
        form, sep, pos = item.rpartition("/")
        if not sep:
            raise ParseError(f"token {i} ({item!r}) is missing its '/POS' separator", lineno)
        if not form:
            raise ParseError(f"token {i} ({item!r}) has an empty form", lineno)
        if not pos:
            raise ParseError(f"token {i} ({item!r}) has an empty POS tag", lineno)
        tokens.append(Token(form=form, pos=pos))
    return Sentence(tokens=tuple(tokens))


def parse_tagged(source: str | Iterable[str]) -> Corpus:
    """Parse POS-tagged records (inline ``form/POS`` or two-column) into a Corpus."""
    documents: list[Document] = []
    seen: set[str] = set()
    current: tuple[str, str | None, int] | None = None
    sentences: list[Sentence] = []
    column_buf: list[Token] = []

    def flush_column():
        nonlocal column_buf
        if column_buf:
            sentences.append(Sentence(tokens=tuple(column_buf)))
            column_buf = []

    def flush_doc():
        if current is None:
            return
        flush_column()
        doc_id, label, header_line = current
        if not sentences:
            raise ValidationError(f"document {doc_id!r} has an empty body (header at line {header_line})")
        documents.append(Document(doc_id=doc_id, label=label, sentences=tuple(sentences)))

    for lineno, raw in enumerate(_as_lines(source), 1):
        line = raw.rstrip()
        if not line.strip():
            flush_column()
            continue
        if line.lstrip().startswith("#"):
            flush_doc()
            sentences = []
            doc_id, label = _parse_header(line.strip(), lineno)
            if doc_id in seen:
                raise ValidationError(f"duplicate doc_id: {doc_id!r} (line {lineno})")
            seen.add(doc_id)
            current = (doc_id, label, lineno)
            continue
        if current is None:
            raise ParseError("token data before any '#doc' header", lineno)
        if "\t" in line:
            fields = [f.strip() for f in line.split("\t") if f.strip()]
            if len(fields) != 2:
                raise ParseError(f"expected 'form<TAB>POS', got {line.strip()!r}", lineno)
            column_buf.append(Token(form=fields[0], pos=fields[1]))
        else:
            flush_column()
            sentences.append(_parse_inline_sentence(line.strip(), lineno))
    flush_doc()
    return Corpus(tuple(documents))


def render_tree(node: TreeNode, tokens: tuple[Token, ...]) -> str:
    """Render a tree back to bracketed text, re-escaping bracket forms."""
    if node.is_leaf:
        return f"({node.label} {_encode_form(tokens[node.leaf].form)})"
    inner = " ".join(render_tree(child, tokens) for child in node.children)
    return f"({node.label} {inner})"


def write_bracketed(corpus: Corpus) -> str:
    """Render a corpus in the bracketed format.  Every sentence needs a tree."""
    lines: list[str] = []
    for doc in corpus.documents:
        header = f"#doc {doc.doc_id}" + (f" {doc.label}" if doc.label else "")
        lines.append(header)
        for sent in doc.sentences:
            if sent.tree is None:
                raise ValidationError(f"document {doc.doc_id!r} has a sentence without a tree")
            lines.append(render_tree(sent.tree, sent.tokens))
    return "\n".join(lines) + "\n" if lines else ""


def write_tagged(corpus: Corpus, columns: bool = False) -> str:
    """Render a corpus in the tagged format.  Every token needs a POS tag."""
    lines: list[str] = []
    for doc in corpus.documents:
        header = f"#doc {doc.doc_id}" + (f" {doc.label}" if doc.label else "")
        lines.append(header)
        for sent in doc.sentences:
            for tok in sent.tokens:
                if tok.pos is None:
                    raise ValidationError(f"document {doc.doc_id!r} has tokens without POS tags")
            if columns:
                lines.extend(f"{t.form}\t{t.pos}" for t in sent.tokens)
                lines.append("")
            else:
                lines.append(" ".join(f"{t.form}/{t.pos}" for t in sent.tokens))
    return "\n".join(lines) + "\n" if lines else ""


def write_canonical(corpus: Corpus) -> str:
    """Render a corpus in the canonical JSONL document format."""
    lines = []
    for doc in corpus.documents:
        sentences = []
        for sent in doc.sentences:
            sentences.append(
                {
                    "tokens": [t.form for t in sent.tokens],
                    "pos": [t.pos for t in sent.tokens],
                    "tree": render_tree(sent.tree, sent.tokens) if sent.tree else None,
                }
            )
        record = {"doc_id": doc.doc_id, "label": doc.label, "sentences": sentences}
        lines.append(json.dumps(record, ensure_ascii=False))
    return "\n".join(lines) + "\n" if lines else ""


def parse_canonical(source: str | Iterable[str]) -> Corpus:
    """Parse the canonical JSONL document format back into a Corpus."""
    documents: list[Document] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(_as_lines(source), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from exc
        if not isinstance(record, dict) or "doc_id" not in record or "sentences" not in record:
            raise ParseError("record must be an object with doc_id and sentences", lineno)
        doc_id = record["doc_id"]
        label = record.get("label")
        if doc_id in seen:
            raise ValidationError(f"duplicate doc_id: {doc_id!r} (line {lineno})")
        seen.add(doc_id)
        sentences = []
        for sent_rec in record["sentences"]:
            forms = sent_rec.get("tokens") or []
            pos_list = sent_rec.get("pos") or [None] * len(forms)
            if len(pos_list) != len(forms):
                raise ParseError("pos list length differs from tokens", lineno)
            tree_str = sent_rec.get("tree")
            tree = None
            if tree_str:
                tree, tree_tokens = parse_tree_line(tree_str, lineno)
                if [t.form for t in tree_tokens] != list(forms):
                    raise ValidationError(f"tree does not match tokens (line {lineno})")
                # tree preterminals win over null POS entries; both present must agree
                merged = []
                for given, from_tree in zip(pos_list, (t.pos for t in tree_tokens)):
                    if given is not None and given != from_tree:
                        raise ValidationError(f"pos list disagrees with tree preterminals (line {lineno})")
                    merged.append(from_tree)
                pos_list = merged
            tokens = tuple(Token(form=f, pos=p) for f, p in zip(forms, pos_list))
            sentences.append(Sentence(tokens=tokens, tree=tree))
        documents.append(Document(doc_id=doc_id, label=label, sentences=tuple(sentences)))
    return Corpus(tuple(documents))
