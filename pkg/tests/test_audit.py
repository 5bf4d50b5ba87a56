import logging

import pytest

from conftest import brute_force_doc_counts
from fragshare.assembler import AssembledExample, AssemblyConfig, assemble
from fragshare.audit import (
    AuditReport,
    CategoryReduction,
    audit_reduction,
    builtin_lexicon,
    corpus_units,
    exposure,
    format_audit_table,
    k_anonymity,
    lexicon_from_terms,
    release_units,
    scan_identifiers,
)
from fragshare.chunker import Fragment, build_pool, extract_tree, filter_rare
from fragshare.errors import ValidationError
from fragshare.ingest import parse_bracketed
from fragshare.model import Corpus

NAME_LOC = lexicon_from_terms({"name": ["john smith"], "location": ["boston"]})


def frag(kind, words, doc_id):
    return Fragment(kind=kind, words=tuple(words.split()), doc_id=doc_id, sent_idx=0, span=(0, len(words.split())))


def example(parts_spec, label="case", example_id="e0"):
    parts = tuple(frag(k, w, d) for k, w, d in parts_spec)
    text = ". ".join(" ".join(p.words) for p in parts)
    return AssembledExample(example_id=example_id, label=label, parts=parts, text=text)


def test_scan_identifiers_hand_count():
    scan = scan_identifiers([["john", "smith", "went", "to", "boston"]], NAME_LOC)
    assert scan.category_words == {"location": 1, "name": 2}
    assert scan.total_words == 5
    assert scan.matched_words == 3
    assert scan.pct("name") == pytest.approx(40.0)
    assert scan.pct("location") == pytest.approx(20.0)


def test_scan_is_case_insensitive():
    scan = scan_identifiers([["John", "SMITH"]], NAME_LOC)
    assert scan.category_words["name"] == 2


def test_empty_lexicon_categories_warn_and_count_zero(caplog):
    lex = lexicon_from_terms({"name": []})
    with caplog.at_level(logging.WARNING):
        scan = scan_identifiers([["anything", "here"]], lex)
    assert scan.category_words == {"name": 0}
    assert any("empty" in r.message for r in caplog.records)


def test_greedy_longest_match_consumes_overlaps():
    lex = lexicon_from_terms({"location": ["new york"], "name": ["york"]})
    scan = scan_identifiers([["new", "york"]], lex)
    assert scan.category_words == {"location": 2, "name": 0}
    assert scan.matched_words == 2


def test_term_in_two_categories_counts_for_both_once_each():
    lex = lexicon_from_terms({"name": ["milton"], "location": ["milton"]})
    scan = scan_identifiers([["near", "milton"]], lex)
    assert scan.category_words == {"location": 1, "name": 1}
    assert scan.matched_words == 1  # union counts the word once


def test_audit_reduction_identity_release():
    # release text identical to the full corpus: full_pct == frag_pct per category
    trees = {
        "a": "(NP (NNP john) (NNP smith))",
        "b": "(VP (VBZ denies) (NP (NN pain)))",
        "c": "(NP (DT the) (NN teacher))",
        "d": "(VP (VBD was) (VP (VBN confused)))",
    }
    corpus = parse_bracketed("\n".join(f"#doc {d} case\n{t}" for d, t in trees.items()))
    parts = [
        ("NP", "john smith", "a"),
        ("NP", "the teacher", "c"),
        ("VP", "denies pain", "b"),
        ("VP", "was confused", "d"),
    ]
    release = [example(parts)]
    lex = lexicon_from_terms({"name": ["john smith"], "occupation": ["teacher"]})
    report = audit_reduction(corpus, release, lex)
    for row in report.categories:
        assert row.full_pct == pytest.approx(row.frag_pct)
    assert report.total.full_pct == pytest.approx(report.total.frag_pct)


def test_audit_reduction_empty_inputs_rejected():
    corpus = parse_bracketed("#doc a\n(NP (DT the) (NN dose))\n")
    with pytest.raises(ValidationError):
        audit_reduction(corpus, [], builtin_lexicon())
    with pytest.raises(ValidationError):
        audit_reduction(Corpus(()), [example([
            ("NP", "a b", "w"), ("NP", "c d", "x"), ("VP", "e f", "y"), ("VP", "g h", "z"),
        ])], builtin_lexicon())


def test_report_table_mirrors_reference_layout():
    # rendering check on a fixed reference table
    report = AuditReport(
        categories=(
            CategoryReduction.compute("name", 0.45, 0.37),
            CategoryReduction.compute("location", 0.60, 0.09),
            CategoryReduction.compute("occupation", 0.0001, 0.0),
            CategoryReduction.compute("drug", 0.0004, 0.0),
        ),
        total=CategoryReduction.compute("all", 1.0, 0.40),
    )
    table = format_audit_table(report)
    lines = table.splitlines()
    assert lines[0].split() == ["Identifier", "Full,", "%", "of", "words", "Frag,", "%", "of", "words"]
    assert any(line.split() == ["Location", "0.6000", "0.0900"] for line in lines)
    assert any(line.split() == ["All", "1.0000", "0.4000"] for line in lines)
    assert "reduction location: 6.67x" in table
    assert "reduction all: 2.50x" in table
    assert "reduction drug: —" in table
    loc = next(r for r in report.categories if r.category == "location")
    assert loc.reduction == pytest.approx(0.60 / 0.09)  # ~6.7x, per the reference
    assert report.total.reduction == pytest.approx(2.5)


def test_k_anonymity_single_doc_reference_forces_k1():
    corpus = parse_bracketed(
        "#doc only case\n"
        "(S (NP (DT the) (NN patient)) (VP (VBZ denies) (NP (NN pain))))\n"
        "(S (NP (DT a) (NN scan)) (VP (VBD was) (VP (VBN given) (NP (NN dose)))))\n"
    )
    parts = [
        ("NP", "the patient", "w"),
        ("NP", "a scan", "x"),
        ("VP", "denies pain", "y"),
        ("VP", "was given dose", "z"),
    ]
    report = k_anonymity([example(parts)], corpus)
    assert set(report.k_histogram) == {1}
    assert report.min_k == 1
    assert report.pct_k1 == 100.0
    assert report.example_link_rate == 100.0
    assert report.intersection_rate == 100.0  # single doc contains every part


def test_k_anonymity_empty_release_rejected():
    corpus = parse_bracketed("#doc a\n(NP (DT the) (NN dose))\n")
    with pytest.raises(ValidationError):
        k_anonymity([], corpus)


def test_k_counts_match_brute_force(synth_200):
    sub = Corpus(synth_200.documents[:80])
    frags = [f for d in sub.documents for f in extract_tree(d)]
    pool = build_pool(sub, frags)
    release = assemble(pool, sub, AssemblyConfig(seed=11, target_ratio=0.5))
    report = k_anonymity(release, sub)
    forms = {p.surface for ex in release for p in ex.parts}
    oracle = brute_force_doc_counts(sub, forms)
    from collections import Counter

    expected_hist = Counter(oracle[p.surface] for ex in release for p in ex.parts)
    assert dict(expected_hist) == dict(report.k_histogram)
    assert report.min_k == min(expected_hist)


def test_rare_filter_lifts_min_k(synth_200):
    frags = [f for d in synth_200.documents for f in extract_tree(d)]
    pool = build_pool(synth_200, frags)
    filtered = filter_rare(pool, 3)
    release = assemble(filtered, synth_200, AssemblyConfig(seed=13, target_ratio=1.0))
    report = k_anonymity(release, synth_200)
    assert report.min_k >= 3
    assert report.pct_k1 == 0.0


def test_monotone_privacy_across_thresholds(synth_200):
    # raising min_doc_freq raises the k floor: every release drawn from a
    # threshold-t pool satisfies min_k >= t, and the pool's own frequency
    # floor never decreases
    frags = [f for d in synth_200.documents for f in extract_tree(d)]
    pool = build_pool(synth_200, frags)
    floors = []
    for threshold in (1, 2, 3, 4):
        filtered = filter_rare(pool, threshold)
        release = assemble(filtered, synth_200, AssemblyConfig(seed=13, target_ratio=0.5))
        report = k_anonymity(release, synth_200)
        assert report.min_k >= threshold
        floors.append(min(filtered.doc_freq.values()))
    assert floors == sorted(floors)


def test_true_source_sets_are_disjoint_by_construction(synth_200):
    frags = [f for d in synth_200.documents[:60] for f in extract_tree(d)]
    pool = build_pool(synth_200, frags)
    release = assemble(pool, synth_200, AssemblyConfig(seed=2, target_ratio=0.3))
    for ex in release:
        sources = [{p.doc_id} for p in ex.parts]
        common = set.intersection(*sources)
        assert common == set()


def test_exposure_vacuous_and_saturated():
    parts = [
        ("NP", "the patient", "w"),
        ("NP", "a scan", "x"),
        ("VP", "denies pain", "y"),
        ("VP", "was admitted", "z"),
    ]
    release = [example(parts)]
    none = exposure(release, lexicon_from_terms({"name": ["zelda"]}))
    assert none == {"name": 0.0}
    saturated_parts = [
        ("NP", "john smith", "w"),
        ("NP", "smith here", "x"),
        ("VP", "saw john", "y"),
        ("VP", "called smith", "z"),
    ]
    lex = lexicon_from_terms({"name": ["john", "smith"]})
    assert exposure([example(saturated_parts)], lex) == {"name": 1.0}


def test_exposure_matches_per_part_brute_force(synth_200):
    frags = [f for d in synth_200.documents for f in extract_tree(d)]
    pool = build_pool(synth_200, frags)
    release = assemble(pool, synth_200, AssemblyConfig(seed=4, target_ratio=0.5))
    lex = builtin_lexicon()
    rates = exposure(release, lex)
    parts = [p for ex in release for p in ex.parts]
    for category, terms in lex.categories.items():
        term_tuples = [tuple(t.split()) for t in terms]
        hits = 0
        for p in parts:
            toks = tuple(w.lower() for w in p.words)
            found = False
            for term in term_tuples:
                n = len(term)
                for i in range(len(toks) - n + 1):
                    if toks[i : i + n] == term:
                        found = True
                        break
                if found:
                    break
            hits += found
        assert rates[category] == pytest.approx(hits / len(parts))


def test_frag_pct_equals_direct_scan_of_release(synth_200):
    # report correctness: the release-side percentages come from its own text
    frags = [f for d in synth_200.documents for f in extract_tree(d)]
    pool = build_pool(synth_200, frags)
    release = assemble(pool, synth_200, AssemblyConfig(seed=6, target_ratio=0.5))
    lex = builtin_lexicon()
    report = audit_reduction(synth_200, release, lex)
    direct = scan_identifiers(release_units(release), lex)
    for row in report.categories:
        assert row.frag_pct == pytest.approx(direct.pct(row.category))


def test_corpus_units_cover_all_words(synth_200):
    units = corpus_units(synth_200)
    assert sum(len(u) for u in units) == sum(d.n_words() for d in synth_200.documents)
