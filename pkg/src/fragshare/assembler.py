"""Synthesis of fragmented training examples.

Each example concatenates two NPs and two VPs drawn from the label's
sub-pool, with all four fragments coming from pairwise-distinct source
documents.  Assembly is seeded and sequential: per-label RNG streams are
derived from the config seed with a content hash, so output is reproducible
and independent across labels.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable

from .chunker import Fragment, FragmentPool
from .errors import PoolExhaustedError, ValidationError
from .model import Corpus
from .rng import derive_seed

log = logging.getLogger(__name__)

ORDER_DEFAULT = ("NP", "NP", "VP", "VP")
REUSE_MODES = ("none", "with_replacement")


@dataclass(frozen=True)
class AssemblyConfig:
    seed: int
    order: tuple[str, ...] = ORDER_DEFAULT
    target_ratio: float = 2.0
    reuse: str = "none"
    separator: str = ". "
    max_redraws: int = 100

    def __post_init__(self):
        if tuple(sorted(self.order)) != ("NP", "NP", "VP", "VP"):
            raise ValidationError(f"order must be a permutation of NP,NP,VP,VP, got {self.order}")
        if self.target_ratio <= 0:
            raise ValidationError("target_ratio must be > 0")
        if self.reuse not in REUSE_MODES:
            raise ValidationError(f"reuse must be one of {REUSE_MODES}")
        if self.max_redraws < 1:
            raise ValidationError("max_redraws must be >= 1")


@dataclass(frozen=True)
class AssembledExample:
    """One synthesized training record: 2 NPs + 2 VPs with an inherited label."""

    example_id: str
    label: str
    parts: tuple[Fragment, ...]
    text: str

    def __post_init__(self):
        kinds = sorted(p.kind for p in self.parts)
        if kinds != ["NP", "NP", "VP", "VP"]:
            raise ValidationError(f"example {self.example_id}: parts must be 2 NPs + 2 VPs")
        doc_ids = [p.doc_id for p in self.parts]
        if len(set(doc_ids)) != 4:
            raise ValidationError(f"example {self.example_id}: source documents must be pairwise distinct")

    @property
    def n_words(self) -> int:
        return sum(p.length for p in self.parts)


@dataclass
class AssemblyStats:
    """Per-label skip/shortfall accounting, filled in by :func:`assemble`."""

    emitted: dict[str, int] = field(default_factory=dict)
    skipped: dict[str, int] = field(default_factory=dict)
    shortfall: dict[str, int] = field(default_factory=dict)


def _render_parts(parts: Iterable[Fragment], cfg: AssemblyConfig) -> str:
    nps = [p for p in parts if p.kind == "NP"]
    vps = [p for p in parts if p.kind == "VP"]
    ordered = [(nps if kind == "NP" else vps).pop(0) for kind in cfg.order]
    return cfg.separator.join(" ".join(p.words) for p in ordered)


def render(example: AssembledExample, cfg: AssemblyConfig) -> str:
    """Join the example's parts in cfg.order using cfg.separator."""
    return _render_parts(example.parts, cfg)


def assemble(
    pool: FragmentPool,
    corpus: Corpus,
    cfg: AssemblyConfig,
    stats: AssemblyStats | None = None,
) -> list[AssembledExample]:
    """Draw examples per label, preserving the corpus label proportions.

    Per label the target count is ``round(target_ratio * n_docs_with_label)``,
    truncated if the sub-pool runs dry.  Draws are uniform without replacement
    (``reuse="none"``); an example whose four fragments cannot be made
    document-distinct within ``max_redraws`` attempts is skipped and counted.
    """
    if stats is None:
        stats = AssemblyStats()
    label_counts = corpus.label_counts
    examples: list[AssembledExample] = []
    for label in corpus.labels():
        n_target = round(cfg.target_ratio * label_counts[label])
        if n_target < 1:
            continue
        label_idx = set(pool.by_label.get(label, ()))
        np_pool = [i for i in pool.by_kind.get("NP", ()) if i in label_idx]
        vp_pool = [i for i in pool.by_kind.get("VP", ()) if i in label_idx]
        distinct_docs = {pool.fragments[i].doc_id for i in label_idx}
        if len(np_pool) < 2 or len(vp_pool) < 2 or len(distinct_docs) < 4:
            raise PoolExhaustedError(
                label,
                f"label {label!r} pool cannot support assembly: "
                f"{len(np_pool)} NPs, {len(vp_pool)} VPs, {len(distinct_docs)} distinct documents "
                "(need >= 2, >= 2, >= 4)",
            )
        rng = random.Random(derive_seed(cfg.seed, f"assemble:{label}"))
        emitted = skipped = 0
        for _ in range(n_target):
            if len(np_pool) < 2 or len(vp_pool) < 2:
                break
            drawn = None
            for _attempt in range(cfg.max_redraws):
                np_pos = rng.sample(range(len(np_pool)), 2)
                vp_pos = rng.sample(range(len(vp_pool)), 2)
                parts = [pool.fragments[np_pool[p]] for p in np_pos] + [
                    pool.fragments[vp_pool[p]] for p in vp_pos
                ]
                if len({p.doc_id for p in parts}) == 4:
                    drawn = (np_pos, vp_pos, parts)
                    break
            if drawn is None:
                skipped += 1
                continue
            np_pos, vp_pos, parts = drawn
            example = AssembledExample(
                example_id=f"{label}-{emitted:05d}",
                label=label,
                parts=tuple(parts),
                text=_render_parts(parts, cfg),
            )
            examples.append(example)
            emitted += 1
            if cfg.reuse == "none":
                for p in sorted(np_pos, reverse=True):
                    np_pool.pop(p)
                for p in sorted(vp_pos, reverse=True):
                    vp_pool.pop(p)
        stats.emitted[label] = emitted
        stats.skipped[label] = skipped
        stats.shortfall[label] = n_target - emitted
        if emitted < n_target:
            log.warning(
                "label %r: emitted %d of %d target examples (%d skipped for distinctness, pool exhausted for the rest)",
                label, emitted, n_target, skipped,
            )
    return examples


def validate_examples(
    examples: Iterable[AssembledExample],
    corpus: Corpus,
    min_len: int = 2,
    max_len: int = 4,
    forbid_reuse: bool = False,
) -> None:
    """Exhaustively re-check the assembly invariants against the source corpus.

    Raises ValidationError on the first violation: part kinds/counts, source
    document distinctness, label purity, part length bounds, total word
    bounds, and provenance (part words must equal the source span's tokens).
    With ``forbid_reuse`` the same fragment may not appear in two examples.
    """
    docs = corpus.doc_map()
    seen_parts: set[tuple[str, int, tuple[int, int]]] = set()
    for ex in examples:
        kinds = sorted(p.kind for p in ex.parts)
        if kinds != ["NP", "NP", "VP", "VP"]:
            raise ValidationError(f"{ex.example_id}: wrong part kinds {kinds}")
        if len({p.doc_id for p in ex.parts}) != len(ex.parts):
            raise ValidationError(f"{ex.example_id}: duplicate source documents")
        total = 0
        for part in ex.parts:
            if not min_len <= part.length <= max_len:
                raise ValidationError(f"{ex.example_id}: part length {part.length} outside [{min_len}, {max_len}]")
            total += part.length
            doc = docs.get(part.doc_id)
            if doc is None:
                raise ValidationError(f"{ex.example_id}: unknown source document {part.doc_id!r}")
            if doc.label != ex.label:
                raise ValidationError(
                    f"{ex.example_id}: part from {part.doc_id!r} has label {doc.label!r}, example is {ex.label!r}"
                )
            if part.sent_idx >= len(doc.sentences):
                raise ValidationError(f"{ex.example_id}: sentence index {part.sent_idx} out of range")
            start, end = part.span
            sent_forms = doc.sentences[part.sent_idx].forms()
            if list(part.words) != sent_forms[start:end]:
                raise ValidationError(f"{ex.example_id}: part words do not match the source span")
            key = (part.doc_id, part.sent_idx, part.span)
            if forbid_reuse and key in seen_parts:
                raise ValidationError(f"{ex.example_id}: fragment {key} reused across examples")
            seen_parts.add(key)
        if not 4 * min_len <= total <= 4 * max_len:
            raise ValidationError(f"{ex.example_id}: total word count {total} outside [{4 * min_len}, {4 * max_len}]")
