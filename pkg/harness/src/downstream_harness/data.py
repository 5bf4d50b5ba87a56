"""Readers for the two JSONL surfaces the pipeline emits.

Training data is either a fragmented release (``{"example_id","label","text"}``
records) or a full-text document file (``{"doc_id","label","sentences"}``
records); the reader detects which per line.  Test data is always the
document form.  Any record that fits neither shape is a schema error naming
the offending line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path


class SchemaError(ValueError):
    """A JSONL record does not match the release or document schema."""


_TOKEN_RE = re.compile(r"[^\s.]+|\.")

LABELS = ("case", "control")
POSITIVE = "case"


def tokenize(text: str) -> list[str]:
    """Lowercase whitespace tokenization with periods as their own tokens."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class LabeledText:
    label: str
    words: tuple[str, ...]
    sentences: tuple[tuple[str, ...], ...] = ()


def _from_release_record(rec: dict) -> LabeledText:
    return LabeledText(label=rec["label"], words=tuple(tokenize(rec["text"])))


def _from_document_record(rec: dict) -> LabeledText:
    sentences = tuple(
        tuple(w.lower() for w in sent["tokens"]) for sent in rec["sentences"]
    )
    words = tuple(w for sent in sentences for w in sent)
    return LabeledText(label=rec["label"], words=words, sentences=sentences)


def load_labeled_texts(path: str | Path) -> list[LabeledText]:
    """Load release or document JSONL; raises SchemaError with the line number."""
    out: list[LabeledText] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: line {lineno}: not valid JSON ({exc.msg})") from exc
        try:
            if not isinstance(rec, dict):
                raise KeyError("record is not an object")
            if rec.get("label") not in LABELS:
                raise KeyError(f"label must be one of {LABELS}")
            if "text" in rec:
                out.append(_from_release_record(rec))
            elif "sentences" in rec:
                out.append(_from_document_record(rec))
            else:
                raise KeyError("record has neither 'text' nor 'sentences'")
        except (KeyError, TypeError, AttributeError) as exc:
            raise SchemaError(f"{path}: line {lineno}: {exc}") from exc
    return out


def load_test_sentences(path: str | Path) -> list[list[str]]:
    """All sentences (token lists) from a document JSONL file, in order."""
    sentences: list[list[str]] = []
    for item in load_labeled_texts(path):
        if not item.sentences:
            raise SchemaError(f"{path}: expected full-text documents with sentences")
        sentences.extend(list(s) for s in item.sentences)
    return sentences


PAD, UNK = "<pad>", "<unk>"


class Vocab:
    """Word vocabulary built from training texts; index 0 pads, 1 is unknown."""

    def __init__(self, texts: list[LabeledText], min_count: int = 1):
        counts: dict[str, int] = {}
        for item in texts:
            for w in item.words:
                counts[w] = counts.get(w, 0) + 1
        self.words = [PAD, UNK] + sorted(w for w, c in counts.items() if c >= min_count)
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def encode(self, words, max_len: int | None = None) -> list[int]:
        ids = [self.index.get(w, 1) for w in words]
        if max_len is not None:
            ids = ids[:max_len] + [0] * (max_len - len(ids))
        return ids
