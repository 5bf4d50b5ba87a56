"""Binary diagnosis-style classification on released or full training data.

An encoder is fine-tuned with the Adam optimizer (10 epochs, lr 3e-5 by
default) on released or full training data and scored with precision,
recall, and F1 on the held-out full-text test set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .data import POSITIVE, LabeledText, Vocab, load_labeled_texts
from .metrics import EvalRecord, precision_recall_f1
from .models import TinyEncoderClassifier

log = logging.getLogger(__name__)

MAX_LEN = 48


@dataclass(frozen=True)
class ClassifyResult:
    record: EvalRecord
    train_loss_start: float
    train_loss_end: float
    n_train: int
    n_test: int


def _batches(ids: torch.Tensor, labels: torch.Tensor, batch_size: int, generator=None):
    order = torch.randperm(len(ids), generator=generator)
    for i in range(0, len(order), batch_size):
        pick = order[i : i + batch_size]
        yield ids[pick], labels[pick]


def _encode_all(texts: list[LabeledText], vocab: Vocab) -> tuple[torch.Tensor, torch.Tensor]:
    ids = torch.tensor([vocab.encode(t.words, MAX_LEN) for t in texts], dtype=torch.long)
    labels = torch.tensor([1 if t.label == POSITIVE else 0 for t in texts], dtype=torch.long)
    return ids, labels


@torch.no_grad()
def _dataset_loss(model: nn.Module, ids: torch.Tensor, labels: torch.Tensor, batch_size: int) -> float:
    model.eval()
    loss_fn = nn.CrossEntropyLoss(reduction="sum")
    total = 0.0
    for i in range(0, len(ids), batch_size):
        logits = model(ids[i : i + batch_size])
        total += float(loss_fn(logits, labels[i : i + batch_size]))
    return total / len(ids)


def finetune_classifier(
    train_path: str | Path,
    test_path: str | Path,
    epochs: int = 10,
    lr: float = 3e-5,
    seed: int = 0,
    batch_size: int = 16,
    data_variant: str = "frag",
) -> ClassifyResult:
    """Train on a release (or full-text) file and score on the full-text test set."""
    train = load_labeled_texts(train_path)
    if not train:
        raise ValueError(f"training file {train_path} is empty; nothing to fine-tune")
    test = load_labeled_texts(test_path)
    if not test:
        raise ValueError(f"test file {test_path} is empty")

    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    vocab = Vocab(train)
    model = TinyEncoderClassifier(len(vocab))
    train_ids, train_labels = _encode_all(train, vocab)
    test_ids, test_labels = _encode_all(test, vocab)

    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    loss_fn = nn.CrossEntropyLoss()
    loss_start = _dataset_loss(model, train_ids, train_labels, batch_size)
    for epoch in range(epochs):
        model.train()
        epoch_loss = 0.0
        n_batches = 0
        for batch_ids, batch_labels in _batches(train_ids, train_labels, batch_size, generator):
            optimizer.zero_grad()
            loss = loss_fn(model(batch_ids), batch_labels)
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach())
            n_batches += 1
        log.info("epoch %d/%d: mean batch loss %.4f", epoch + 1, epochs, epoch_loss / max(n_batches, 1))
    loss_end = _dataset_loss(model, train_ids, train_labels, batch_size)

    model.eval()
    with torch.no_grad():
        predictions = model(test_ids).argmax(dim=1)
    y_true = [POSITIVE if int(y) else "control" for y in test_labels]
    y_pred = [POSITIVE if int(y) else "control" for y in predictions]
    record = EvalRecord(
        task="classification",
        data_variant=data_variant,
        metrics=precision_recall_f1(y_true, y_pred, positive=POSITIVE),
    )
    return ClassifyResult(
        record=record,
        train_loss_start=loss_start,
        train_loss_end=loss_end,
        n_train=len(train),
        n_test=len(test),
    )
