"""Next-word prediction: fine-tune a small causal LM, evaluate on test sentences.

The protocol takes each test sentence's first five words as the prompt and
scores the greedy prediction of the sixth word, reporting top-1 accuracy and
the mean probability assigned to the gold word.  Training uses AdamW with
batch size 3 over 3 epochs by default.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import torch
from torch import nn

from .data import Vocab, load_labeled_texts
from .metrics import EvalRecord
from .models import NextWordPredictor, TinyCausalLM

log = logging.getLogger(__name__)

SEQ_LEN = 24
PROMPT_WORDS = 5


class NextWordModel(Protocol):
    def predict_next(self, prompt: Sequence[str]) -> str: ...

    def word_probability(self, prompt: Sequence[str], word: str) -> float: ...


@dataclass(frozen=True)
class LmEvalResult:
    record: EvalRecord
    n_evaluated: int
    n_skipped: int


@dataclass(frozen=True)
class LmTrainResult:
    predictor: NextWordPredictor
    train_loss_start: float
    train_loss_end: float


def _sequence_batches(ids: torch.Tensor, batch_size: int, generator=None):
    order = torch.randperm(len(ids), generator=generator)
    for i in range(0, len(order), batch_size):
        yield ids[order[i : i + batch_size]]


@torch.no_grad()
def _dataset_loss(model: TinyCausalLM, ids: torch.Tensor, batch_size: int) -> float:
    model.eval()
    loss_fn = nn.CrossEntropyLoss(ignore_index=0, reduction="sum")
    total = tokens = 0.0
    for i in range(0, len(ids), batch_size):
        batch = ids[i : i + batch_size]
        logits = model(batch[:, :-1])
        targets = batch[:, 1:]
        total += float(loss_fn(logits.reshape(-1, logits.size(-1)), targets.reshape(-1)))
        tokens += int(targets.ne(0).sum())
    return total / max(tokens, 1.0)


def finetune_lm(
    train_path: str | Path,
    epochs: int = 3,
    lr: float = 1e-3,
    seed: int = 0,
    batch_size: int = 3,
) -> LmTrainResult:
    """Fine-tune the small causal LM on release (or full-text) training data."""
    train = load_labeled_texts(train_path)
    if not train:
        raise ValueError(f"training file {train_path} is empty; nothing to fine-tune")
    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    vocab = Vocab(train)
    model = TinyCausalLM(len(vocab), max_len=SEQ_LEN)
    ids = torch.tensor([vocab.encode(t.words, SEQ_LEN) for t in train], dtype=torch.long)

    optimizer = torch.optim.AdamW(model.parameters(), lr=lr)
    loss_fn = nn.CrossEntropyLoss(ignore_index=0)
    loss_start = _dataset_loss(model, ids, batch_size)
    for epoch in range(epochs):
        model.train()
        for batch in _sequence_batches(ids, batch_size, generator):
            optimizer.zero_grad()
            logits = model(batch[:, :-1])
            loss = loss_fn(logits.reshape(-1, logits.size(-1)), batch[:, 1:].reshape(-1))
            loss.backward()
            optimizer.step()
        log.info("epoch %d/%d done", epoch + 1, epochs)
    loss_end = _dataset_loss(model, ids, batch_size)
    return LmTrainResult(
        predictor=NextWordPredictor(model, vocab),
        train_loss_start=loss_start,
        train_loss_end=loss_end,
    )


def eval_next_word(
    model: NextWordModel, sentences: Sequence[Sequence[str]], data_variant: str = "frag"
) -> LmEvalResult:
    """Top-1 accuracy and mean gold probability for word six; short sentences skip."""
    hits = 0
    prob_sum = 0.0
    evaluated = 0
    skipped = 0
    for sent in sentences:
        if len(sent) < PROMPT_WORDS + 1:
            skipped += 1
            continue
        prompt = list(sent[:PROMPT_WORDS])
        gold = sent[PROMPT_WORDS]
        if model.predict_next(prompt) == gold:
            hits += 1
        prob_sum += model.word_probability(prompt, gold)
        evaluated += 1
    if evaluated == 0:
        raise ValueError("no test sentence has at least six words")
    record = EvalRecord(
        task="lm",
        data_variant=data_variant,
        metrics={
            "next_word_accuracy": hits / evaluated,
            "mean_gold_probability": prob_sum / evaluated,
        },
    )
    return LmEvalResult(record=record, n_evaluated=evaluated, n_skipped=skipped)
