import json
import logging

import pytest

from fragshare.assembler import AssembledExample, AssemblyConfig, assemble
from fragshare.chunker import Fragment, build_pool, extract_tree
from fragshare.dataset import (
    ReleaseStats,
    SplitSpec,
    emit_release,
    read_release,
    render_release_lines,
    split,
    stats,
)
from fragshare.errors import ValidationError
from fragshare.model import Corpus, Document, Sentence, Token
from fragshare.synthetic import SynthSpec, generate_synthetic


def frag(kind, words, doc_id):
    ws = tuple(words.split())
    return Fragment(kind=kind, words=ws, doc_id=doc_id, sent_idx=0, span=(0, len(ws)))


def example(i, label="case", docs=("a", "b", "c", "d"), words=("w1 w2",) * 4):
    parts = (
        frag("NP", words[0], docs[0]),
        frag("NP", words[1], docs[1]),
        frag("VP", words[2], docs[2]),
        frag("VP", words[3], docs[3]),
    )
    text = ". ".join(" ".join(p.words) for p in parts)
    return AssembledExample(example_id=f"{label}-{i:05d}", label=label, parts=parts, text=text)


def test_split_stratified_arithmetic(synth_200):
    train, test = split(synth_200, SplitSpec(seed=1))
    assert test.label_counts == {"case": 2, "control": 18}
    assert train.label_counts == {"case": 18, "control": 162}


def test_split_is_deterministic_and_a_partition(synth_200):
    a_train, a_test = split(synth_200, SplitSpec(seed=5))
    b_train, b_test = split(synth_200, SplitSpec(seed=5))
    assert a_train == b_train and a_test == b_test
    train_ids = {d.doc_id for d in a_train.documents}
    test_ids = {d.doc_id for d in a_test.documents}
    assert train_ids & test_ids == set()
    assert train_ids | test_ids == {d.doc_id for d in synth_200.documents}
    c_train, c_test = split(synth_200, SplitSpec(seed=6))
    assert {d.doc_id for d in c_test.documents} != test_ids


def test_split_requires_ten_docs_per_label():
    corpus = generate_synthetic(SynthSpec(n_docs=50, seed=1, case_fraction=0.1))
    assert corpus.label_counts["case"] == 5
    with pytest.raises(ValidationError, match="need >= 10"):
        split(corpus, SplitSpec(seed=1))
    train, test = split(corpus, SplitSpec(seed=1, stratify=False))
    assert len(test.documents) == 5


def test_split_fraction_bounds():
    with pytest.raises(ValidationError):
        SplitSpec(seed=1, test_fraction=0.0)
    with pytest.raises(ValidationError):
        SplitSpec(seed=1, test_fraction=1.0)


def test_emit_without_provenance_has_no_doc_ids(tmp_path):
    examples = [example(i) for i in range(3)]
    path = tmp_path / "release.jsonl"
    emit_release(examples, path, with_provenance=False)
    content = path.read_text(encoding="utf-8")
    for doc_id in ("a", "b", "c", "d"):
        assert f'"{doc_id}"' not in content
    assert "doc_id" not in content and "span" not in content and "sent_idx" not in content
    records = [json.loads(line) for line in content.splitlines()]
    assert all(set(r) == {"example_id", "label", "text"} for r in records)


def test_emit_key_order_is_fixed():
    line = render_release_lines([example(0)], with_provenance=True)[0]
    rec_pairs = json.loads(line, object_pairs_hook=list)
    assert [k for k, _ in rec_pairs] == ["example_id", "label", "text", "parts"]
    part_keys = list(json.loads(line)["parts"][0].keys())
    assert part_keys == ["kind", "words", "doc_id", "sent_idx", "span"]


def test_emit_empty_release_warns_and_succeeds(tmp_path, caplog):
    path = tmp_path / "empty.jsonl"
    with caplog.at_level(logging.WARNING):
        emit_release([], path)
    assert path.read_text(encoding="utf-8") == ""
    assert any("empty" in r.message for r in caplog.records)


def test_emit_is_byte_stable(tmp_path):
    examples = [example(i) for i in range(5)]
    p1, p2 = tmp_path / "r1.jsonl", tmp_path / "r2.jsonl"
    emit_release(examples, p1, with_provenance=True)
    emit_release(examples, p2, with_provenance=True)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_bytes().endswith(b"\n")
    assert b"\r" not in p1.read_bytes()


def test_emit_io_error_carries_path(tmp_path):
    with pytest.raises(OSError, match="no/such"):
        emit_release([example(0)], tmp_path / "no" / "such" / "dir.jsonl")


def test_release_round_trip(tmp_path):
    examples = [example(i) for i in range(4)]
    path = tmp_path / "release.audit.jsonl"
    emit_release(examples, path, with_provenance=True)
    assert read_release(path.read_text(encoding="utf-8")) == examples


def test_read_release_without_parts_is_an_error(tmp_path):
    path = tmp_path / "release.jsonl"
    emit_release([example(0)], path, with_provenance=False)
    with pytest.raises(ValidationError, match="provenance"):
        read_release(path.read_text(encoding="utf-8"))


def test_stats_forced_arithmetic():
    sent = Sentence(tokens=(Token("x", "NN"),))
    source = Corpus(tuple(Document(doc_id=f"d{i}", label="case", sentences=(sent,)) for i in range(4)))
    examples = [example(0, docs=("d0", "d1", "d2", "d3"))]
    st = stats(examples, source)
    assert st.mean_example_words == 8.0
    assert st.max_example_words == 8
    assert st.mean_part_words == 2.0
    assert st.max_part_words == 2
    assert st.label_counts == {"case": 1}


def test_stats_word_bounds_on_assembled_release(synth_200):
    frags = [f for d in synth_200.documents for f in extract_tree(d)]
    pool = build_pool(synth_200, frags)
    release = assemble(pool, synth_200, AssemblyConfig(seed=21, target_ratio=1.0))
    st = stats(release, synth_200)
    assert 8 <= st.mean_example_words <= 16
    assert st.max_example_words <= 16
    assert st.max_example_words >= st.mean_example_words
    assert st.max_part_words <= 4
    assert sum(st.label_counts.values()) == st.n_examples


def test_stats_ratio_at_reference_scale():
    # 23K examples over 12K source documents comes out at ~1.9 examples per doc
    sent = Sentence(tokens=(Token("x", "NN"),))
    source = Corpus(tuple(Document(doc_id=f"d{i}", label="case", sentences=(sent,)) for i in range(12)))
    examples = [
        example(i, docs=tuple(f"d{(i + j) % 12}" for j in (0, 3, 6, 9)))
        for i in range(23)
    ]
    st = stats(examples, source)
    assert st.examples_per_source_doc == pytest.approx(23 / 12)
    assert round(st.examples_per_source_doc, 1) == 1.9
    assert round(23000 / 12000, 1) == 1.9


def test_stats_empty_release_rejected(synth_200):
    with pytest.raises(ValidationError):
        stats([], synth_200)


def test_release_stats_to_dict_round_trips():
    st = ReleaseStats(
        n_examples=2,
        label_counts={"case": 2},
        mean_example_words=8.0,
        max_example_words=8,
        mean_part_words=2.0,
        max_part_words=2,
        examples_per_source_doc=0.5,
    )
    d = st.to_dict()
    assert d["n_examples"] == 2 and d["label_counts"] == {"case": 2}
