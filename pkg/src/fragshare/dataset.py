"""Corpus splitting, release emission, and release statistics.

The held-out test split keeps full original texts; only the training split
ever flows into chunking and assembly.  Releases are emitted as stable JSONL
(fixed key order, LF endings) so identical inputs produce byte-identical
files.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Iterable, Mapping, Sequence

from .assembler import AssembledExample
from .chunker import Fragment
from .errors import ParseError, ValidationError
from .model import Corpus
from .rng import derive_seed

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    test_fraction: float = 0.10
    stratify: bool = True

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValidationError("test_fraction must be in (0, 1)")


def _stratum_quotas(counts: Mapping[str | None, int], fraction: float) -> dict[str | None, int]:
    # largest-remainder rounding per label, constrained to round(fraction * N)
    total = round(fraction * sum(counts.values()))
    exact = {label: fraction * n for label, n in counts.items()}
    quotas = {label: math.floor(x) for label, x in exact.items()}
    remainder = total - sum(quotas.values())
    order = sorted(
        counts,
        key=lambda lab: (-(exact[lab] - quotas[lab]), lab is None, str(lab)),
    )
    for label in order[:remainder]:
        quotas[label] += 1
    return quotas


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Deterministic train/test partition; stratified per label by default."""
    n = len(corpus.documents)
    if n == 0:
        raise ValidationError("cannot split an empty corpus")
    rng = Random(derive_seed(spec.seed, "split"))
    if spec.stratify:
        counts = corpus.label_counts
        for label, count in counts.items():
            if count < 10:
                raise ValidationError(
                    f"label {label!r} has only {count} documents; need >= 10 for a stratified split"
                )
        quotas = _stratum_quotas(counts, spec.test_fraction)
        test_ids: set[str] = set()
        by_label: dict[str | None, list[str]] = {}
        for doc in corpus.documents:
            by_label.setdefault(doc.label, []).append(doc.doc_id)
        for label in sorted(by_label, key=lambda lab: (lab is None, str(lab))):
            test_ids.update(rng.sample(by_label[label], quotas[label]))
    else:
        n_test = round(spec.test_fraction * n)
        test_ids = set(rng.sample([d.doc_id for d in corpus.documents], n_test))
    train = Corpus(tuple(d for d in corpus.documents if d.doc_id not in test_ids))
    test = Corpus(tuple(d for d in corpus.documents if d.doc_id in test_ids))
    return train, test


def render_release_lines(
    examples: Sequence[AssembledExample], with_provenance: bool = False
) -> list[str]:
    """JSONL lines with fixed key order; provenance only when requested."""
    lines = []
    for ex in examples:
        record: dict = {"example_id": ex.example_id, "label": ex.label, "text": ex.text}
        if with_provenance:
            record["parts"] = [
                {
                    "kind": p.kind,
                    "words": list(p.words),
                    "doc_id": p.doc_id,
                    "sent_idx": p.sent_idx,
                    "span": list(p.span),
                }
                for p in ex.parts
            ]
        lines.append(json.dumps(record, ensure_ascii=False))
    return lines


def emit_release(
    examples: Sequence[AssembledExample], path: str | Path, with_provenance: bool = False
) -> Path:
    """Write the release JSONL (UTF-8, LF); byte-identical for equal inputs."""
    path = Path(path)
    if not examples:
        log.warning("emitting an empty release to %s", path)
    lines = render_release_lines(examples, with_provenance)
    text = "\n".join(lines) + "\n" if lines else ""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write release to {path}: {exc}") from exc
    return path


def read_release(source: str | Iterable[str], require_parts: bool = True) -> list[AssembledExample]:
    """Parse a release back into examples; audits need the provenance variant."""
    if isinstance(source, str):
        source = source.splitlines()
    examples = []
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from exc
        if "parts" not in rec:
            if require_parts:
                raise ValidationError(
                    f"release line {lineno} has no part provenance; audits need the "
                    "provenance-bearing variant (release.audit.jsonl)"
                )
            continue
        try:
            parts = tuple(
                Fragment(
                    kind=p["kind"],
                    words=tuple(p["words"]),
                    doc_id=p["doc_id"],
                    sent_idx=p["sent_idx"],
                    span=tuple(p["span"]),
                )
                for p in rec["parts"]
            )
            examples.append(
                AssembledExample(
                    example_id=rec["example_id"], label=rec["label"], parts=parts, text=rec["text"]
                )
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad release record: {exc}", lineno) from exc
    return examples


@dataclass(frozen=True)
class ReleaseStats:
    n_examples: int
    label_counts: Mapping[str, int]
    mean_example_words: float
    max_example_words: int
    mean_part_words: float
    max_part_words: int
    examples_per_source_doc: float

    def to_dict(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "label_counts": dict(sorted(self.label_counts.items())),
            "mean_example_words": self.mean_example_words,
            "max_example_words": self.max_example_words,
            "mean_part_words": self.mean_part_words,
            "max_part_words": self.max_part_words,
            "examples_per_source_doc": self.examples_per_source_doc,
        }


def stats(examples: Sequence[AssembledExample], source: Corpus) -> ReleaseStats:
    """Word-length statistics over rendered parts (separators excluded)."""
    if not examples:
        raise ValidationError("cannot compute stats over an empty release")
    label_counts: dict[str, int] = {}
    example_lengths = []
    part_lengths = []
    for ex in examples:
        label_counts[ex.label] = label_counts.get(ex.label, 0) + 1
        example_lengths.append(ex.n_words)
        part_lengths.extend(p.length for p in ex.parts)
    return ReleaseStats(
        n_examples=len(examples),
        label_counts=label_counts,
        mean_example_words=sum(example_lengths) / len(example_lengths),
        max_example_words=max(example_lengths),
        mean_part_words=sum(part_lengths) / len(part_lengths),
        max_part_words=max(part_lengths),
        examples_per_source_doc=len(examples) / len(source.documents),
    )


def format_stats(st: ReleaseStats) -> str:
    lines = [
        f"examples: {st.n_examples}",
        "per label: "
        + ", ".join(f"{label}={count}" for label, count in sorted(st.label_counts.items())),
        f"example words: mean {st.mean_example_words:.2f}, max {st.max_example_words}",
        f"part words: mean {st.mean_part_words:.2f}, max {st.max_part_words}",
        f"examples per source document: {st.examples_per_source_doc:.2f}",
    ]
    return "\n".join(lines) + "\n"
