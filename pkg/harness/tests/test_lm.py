import json

import pytest

from downstream_harness.lm import eval_next_word, finetune_lm


class StubOracle:
    """Always predicts the gold word; the test wires prompts to golds."""

    def __init__(self, sentences):
        self.gold = {tuple(s[:5]): s[5] for s in sentences if len(s) >= 6}

    def predict_next(self, prompt):
        return self.gold[tuple(prompt)]

    def word_probability(self, prompt, word):
        return 1.0 if self.gold[tuple(prompt)] == word else 0.0


SENTS = [
    ["the", "patient", "denies", "pain", "most", "days"],
    ["the", "exam", "was", "fine", "again", "today", "too"],
    ["short", "one"],
]


def test_stub_oracle_scores_perfect_accuracy():
    result = eval_next_word(StubOracle(SENTS), SENTS)
    assert result.record.metrics["next_word_accuracy"] == 1.0
    assert result.record.metrics["mean_gold_probability"] == 1.0
    assert result.n_evaluated == 2
    assert result.n_skipped == 1


def test_all_short_sentences_is_an_error():
    with pytest.raises(ValueError, match="six words"):
        eval_next_word(StubOracle(SENTS), [["too", "short"]])


def write_release(path, texts):
    lines = [
        json.dumps({"example_id": f"e{i}", "label": "case", "text": t})
        for i, t in enumerate(texts)
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    texts = [
        "the patient. the exam. denies pain. was stable",
        "the workup. a scan. shows swelling. remained alert",
        "the course. the review. reports fatigue. was confused",
        "the patient. the dose. denies fever. was admitted",
    ] * 5
    path = write_release(tmp_path_factory.mktemp("lm") / "release.jsonl", texts)
    return finetune_lm(path, epochs=3, lr=1e-2, seed=0, batch_size=3)


def test_lm_training_reduces_loss(trained):
    assert trained.train_loss_end < trained.train_loss_start


def test_lm_eval_is_deterministic(trained):
    sents = [
        ["the", "patient", ".", "the", "exam", "."],
        ["the", "workup", ".", "a", "scan", "."],
        ["unseen", "words", "here", "for", "gold", "zzz"],
    ]
    first = eval_next_word(trained.predictor, sents)
    second = eval_next_word(trained.predictor, sents)
    assert first.record.metrics == second.record.metrics
    assert 0.0 <= first.record.metrics["next_word_accuracy"] <= 1.0


def test_oov_gold_scores_zero_probability(trained):
    prob = trained.predictor.word_probability(["the", "patient", ".", "the", "exam"], "zzz")
    assert prob == 0.0


def test_predictor_never_outputs_specials(trained):
    word = trained.predictor.predict_next(["the", "patient", ".", "the", "exam"])
    assert word not in ("<pad>", "<unk>")


def test_empty_training_file_is_an_error(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="empty"):
        finetune_lm(empty, epochs=1)
