"""Identifier-leakage and linkage-risk audits over a fragmented release.

Three measurements:

* identifier word percentages in the full corpus vs. the release, per
  lexicon category, with per-category reduction factors;
* fragment k-anonymity against a reference corpus (how many documents an
  adversary could match each released part to), with per-example link and
  candidate-intersection rates;
* chunk-level exposure: the fraction of released parts containing at least
  one identifier term.

Matching is exact, case-insensitive token-sequence matching throughout.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .assembler import AssembledExample
from .errors import ValidationError
from .match import doc_matches
from .model import Corpus

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdentifierLexicon:
    """Identifier terms by category; terms are lowercase, possibly multi-word."""

    categories: Mapping[str, frozenset[str]]

    def __post_init__(self):
        for name, terms in self.categories.items():
            if not name:
                raise ValidationError("category name must be non-empty")
            for term in terms:
                if not term or term != term.strip() or term != term.lower():
                    raise ValidationError(f"bad lexicon term {term!r} in category {name!r}")

    def names(self) -> list[str]:
        return sorted(self.categories)


def lexicon_from_terms(categories: Mapping[str, Iterable[str]]) -> IdentifierLexicon:
    return IdentifierLexicon(
        {name: frozenset(t.strip().lower() for t in terms if t.strip()) for name, terms in categories.items()}
    )


def load_lexicon_dir(path: str | Path) -> IdentifierLexicon:
    """Load ``*.txt`` wordlists from a directory; the file stem names the category."""
    path = Path(path)
    files = sorted(path.glob("*.txt"))
    if not files:
        raise ValidationError(f"no lexicon files (*.txt) in {path}")
    categories = {}
    for f in files:
        terms = []
        for line in f.read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                terms.append(line.lower())
        categories[f.stem] = terms
    return lexicon_from_terms(categories)


def builtin_lexicon() -> IdentifierLexicon:
    """The packaged sample lexicons (aligned with the synthetic generator)."""
    return load_lexicon_dir(Path(__file__).parent / "lexicons")


@dataclass(frozen=True)
class ScanCounts:
    """Greedy identifier-match totals over a token stream."""

    category_words: Mapping[str, int]
    matched_words: int  # union: each consumed word counted once
    total_words: int

    def pct(self, category: str) -> float:
        if self.total_words == 0:
            return 0.0
        return 100.0 * self.category_words.get(category, 0) / self.total_words

    @property
    def matched_pct(self) -> float:
        if self.total_words == 0:
            return 0.0
        return 100.0 * self.matched_words / self.total_words


def _term_index(lexicon: IdentifierLexicon) -> tuple[dict[tuple[str, ...], list[str]], list[int]]:
    index: dict[tuple[str, ...], list[str]] = {}
    for category in lexicon.names():
        terms = lexicon.categories[category]
        if not terms:
            log.warning("lexicon category %r is empty; it will always count zero", category)
        for term in terms:
            index.setdefault(tuple(term.split()), []).append(category)
    lengths = sorted({len(k) for k in index}, reverse=True)
    return index, lengths


def scan_identifiers(units: Iterable[Sequence[str]], lexicon: IdentifierLexicon) -> ScanCounts:
    """Count identifier words with greedy longest-match over token units.

    A matched n-word term consumes its tokens (no overlapping rematch) and
    contributes n words to every category that lists the term, and n words
    once to the union total.  Matches never cross unit boundaries.
    """
    index, lengths = _term_index(lexicon)
    category_words: Counter[str] = Counter({name: 0 for name in lexicon.names()})
    matched = 0
    total = 0
    for unit in units:
        toks = [w.lower() for w in unit]
        total += len(toks)
        i = 0
        while i < len(toks):
            hit = None
            for n in lengths:
                if i + n > len(toks):
                    continue
                gram = tuple(toks[i : i + n])
                if gram in index:
                    hit = (n, index[gram])
                    break
            if hit is None:
                i += 1
                continue
            n, cats = hit
            for cat in cats:
                category_words[cat] += n
            matched += n
            i += n
    return ScanCounts(category_words=dict(category_words), matched_words=matched, total_words=total)


def corpus_units(corpus: Corpus) -> list[list[str]]:
    """One token unit per sentence; identifier matches never cross sentences."""
    return [s.forms() for doc in corpus.documents for s in doc.sentences]


def release_units(release: Iterable[AssembledExample]) -> list[list[str]]:
    """One token unit per part; separators are excluded from word totals."""
    return [list(p.words) for ex in release for p in ex.parts]


@dataclass(frozen=True)
class CategoryReduction:
    category: str
    full_pct: float
    frag_pct: float
    reduction: float | None  # full/frag; None when frag is zero

    @staticmethod
    def compute(category: str, full_pct: float, frag_pct: float) -> "CategoryReduction":
        reduction = (full_pct / frag_pct) if frag_pct > 0 else None
        return CategoryReduction(category, full_pct, frag_pct, reduction)


@dataclass(frozen=True)
class AuditReport:
    """Identifier percentages in full vs. fragmented data, with a union total."""

    categories: tuple[CategoryReduction, ...]
    total: CategoryReduction

    def to_dict(self) -> dict:
        def row(r: CategoryReduction) -> dict:
            return {
                "category": r.category,
                "full_pct": r.full_pct,
                "frag_pct": r.frag_pct,
                "reduction": r.reduction,
            }

        return {"categories": [row(r) for r in self.categories], "total": row(self.total)}


def audit_reduction(
    full: Corpus, release: Sequence[AssembledExample], lexicon: IdentifierLexicon
) -> AuditReport:
    """Identifier word percentages, full corpus vs. fragmented release."""
    if not full.documents:
        raise ValidationError("full corpus is empty")
    if not release:
        raise ValidationError("release is empty")
    full_scan = scan_identifiers(corpus_units(full), lexicon)
    frag_scan = scan_identifiers(release_units(release), lexicon)
    rows = tuple(
        CategoryReduction.compute(cat, full_scan.pct(cat), frag_scan.pct(cat))
        for cat in lexicon.names()
    )
    total = CategoryReduction.compute("all", full_scan.matched_pct, frag_scan.matched_pct)
    return AuditReport(categories=rows, total=total)


@dataclass(frozen=True)
class LinkageReport:
    """Fragment k-anonymity of a release against a reference corpus."""

    k_histogram: Mapping[int, int]
    min_k: int
    pct_k1: float
    example_link_rate: float
    intersection_rate: float
    n_examples: int
    n_parts: int

    def to_dict(self) -> dict:
        return {
            "k_histogram": {str(k): v for k, v in sorted(self.k_histogram.items())},
            "min_k": self.min_k,
            "pct_k1": self.pct_k1,
            "example_link_rate": self.example_link_rate,
            "intersection_rate": self.intersection_rate,
            "n_examples": self.n_examples,
            "n_parts": self.n_parts,
        }


def k_anonymity(release: Sequence[AssembledExample], reference: Corpus) -> LinkageReport:
    """k per part = distinct reference documents containing the part's surface form.

    ``example_link_rate`` is the share of examples with any uniquely matched
    part (k = 1); ``intersection_rate`` is the share of examples whose parts'
    candidate document sets have a non-empty common intersection.
    """
    if not release:
        raise ValidationError("release is empty")
    forms = {p.surface for ex in release for p in ex.parts}
    candidates = doc_matches(reference, forms)
    histogram: Counter[int] = Counter()
    n_parts = 0
    n_linked_examples = 0
    n_intersecting = 0
    min_k: int | None = None
    for ex in release:
        ks = []
        sets = []
        for part in ex.parts:
            cand = candidates[part.surface]
            k = len(cand)
            ks.append(k)
            sets.append(cand)
            histogram[k] += 1
            n_parts += 1
            min_k = k if min_k is None else min(min_k, k)
        if any(k == 1 for k in ks):
            n_linked_examples += 1
        common = set(sets[0])
        for s in sets[1:]:
            common &= s
        if common:
            n_intersecting += 1
    n_examples = len(release)
    return LinkageReport(
        k_histogram=dict(histogram),
        min_k=min_k if min_k is not None else 0,
        pct_k1=100.0 * histogram.get(1, 0) / n_parts,
        example_link_rate=100.0 * n_linked_examples / n_examples,
        intersection_rate=100.0 * n_intersecting / n_examples,
        n_examples=n_examples,
        n_parts=n_parts,
    )


def _contains_term(words: Sequence[str], terms_by_len: Mapping[int, set[tuple[str, ...]]]) -> bool:
    toks = tuple(w.lower() for w in words)
    for n, terms in terms_by_len.items():
        for i in range(len(toks) - n + 1):
            if toks[i : i + n] in terms:
                return True
    return False


def exposure(release: Sequence[AssembledExample], lexicon: IdentifierLexicon) -> dict[str, float]:
    """Per category: the fraction of parts containing at least one term."""
    if not release:
        raise ValidationError("release is empty")
    parts = [p for ex in release for p in ex.parts]
    out = {}
    for category in lexicon.names():
        terms_by_len: dict[int, set[tuple[str, ...]]] = {}
        for term in lexicon.categories[category]:
            words = tuple(term.split())
            terms_by_len.setdefault(len(words), set()).add(words)
        hits = sum(1 for p in parts if _contains_term(p.words, terms_by_len))
        out[category] = hits / len(parts)
    return out


def format_audit_table(report: AuditReport) -> str:
    """Aligned text table (columns: Identifier, Full %, Frag %) plus reductions."""

    def fmt_pct(x: float) -> str:
        return f"{x:.4f}"

    rows = [("Identifier", "Full, % of words", "Frag, % of words")]
    for r in report.categories:
        rows.append((r.category.capitalize(), fmt_pct(r.full_pct), fmt_pct(r.frag_pct)))
    rows.append(("All", fmt_pct(report.total.full_pct), fmt_pct(report.total.frag_pct)))
    widths = [max(len(row[i]) for row in rows) for i in range(3)]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("-" * (sum(widths) + 4))
    lines.append("")
    for r in list(report.categories) + [report.total]:
        factor = "—" if r.reduction is None else f"{r.reduction:.2f}x"
        lines.append(f"reduction {r.category}: {factor}")
    return "\n".join(lines) + "\n"


def format_linkage(report: LinkageReport) -> str:
    lines = [
        f"parts audited: {report.n_parts} (from {report.n_examples} examples)",
        f"min k: {report.min_k}",
        f"parts with k = 1: {report.pct_k1:.2f}%",
        f"examples with any k = 1 part: {report.example_link_rate:.2f}%",
        f"examples with non-empty candidate intersection: {report.intersection_rate:.2f}%",
        "k histogram:",
    ]
    for k in sorted(report.k_histogram):
        lines.append(f"  k={k}: {report.k_histogram[k]}")
    return "\n".join(lines) + "\n"


def format_exposure(rates: Mapping[str, float]) -> str:
    lines = ["chunk-level identifier exposure (share of parts with a match):"]
    for category in sorted(rates):
        lines.append(f"  {category}: {rates[category]:.4f}")
    return "\n".join(lines) + "\n"


def write_audit_json(report: AuditReport, linkage: LinkageReport, exposure_rates: Mapping[str, float]) -> str:
    payload = {
        "reduction": report.to_dict(),
        "linkage": linkage.to_dict(),
        "exposure": {k: exposure_rates[k] for k in sorted(exposure_rates)},
    }
    return json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n"
