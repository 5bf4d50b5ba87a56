"""Tiny transformer models sized for CPU smoke runs.

Large pretrained checkpoints are not fetchable in this environment, so the
harness trains small randomly initialized analogues under the same
optimizers and protocol.  Absolute scores are therefore only comparable
within a run, never across model scales.
"""

from __future__ import annotations

import math

import torch
from torch import nn


class TinyEncoderClassifier(nn.Module):
    """Mean-pooled transformer encoder with a binary head."""

    def __init__(self, vocab_size: int, d_model: int = 32, nhead: int = 4, layers: int = 1):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, d_model, padding_idx=0)
        self.pos = nn.Parameter(torch.zeros(1, 64, d_model))
        layer = nn.TransformerEncoderLayer(
            d_model=d_model, nhead=nhead, dim_feedforward=4 * d_model,
            batch_first=True, dropout=0.0,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers)
        self.head = nn.Linear(d_model, 2)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        mask = ids.eq(0)
        x = self.embed(ids) + self.pos[:, : ids.size(1)]
        x = self.encoder(x, src_key_padding_mask=mask)
        keep = (~mask).unsqueeze(-1).float()
        pooled = (x * keep).sum(dim=1) / keep.sum(dim=1).clamp(min=1.0)
        return self.head(pooled)


class TinyCausalLM(nn.Module):
    """Decoder-only next-word model with greedy prediction helpers."""

    def __init__(self, vocab_size: int, d_model: int = 32, nhead: int = 4, layers: int = 1, max_len: int = 64):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, d_model, padding_idx=0)
        self.pos = nn.Parameter(torch.zeros(1, max_len, d_model))
        layer = nn.TransformerEncoderLayer(
            d_model=d_model, nhead=nhead, dim_feedforward=4 * d_model,
            batch_first=True, dropout=0.0,
        )
        self.blocks = nn.TransformerEncoder(layer, num_layers=layers)
        self.head = nn.Linear(d_model, vocab_size)
        self.max_len = max_len

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        seq_len = ids.size(1)
        causal = torch.triu(torch.full((seq_len, seq_len), -math.inf), diagonal=1)
        x = self.embed(ids) + self.pos[:, :seq_len]
        x = self.blocks(x, mask=causal)
        return self.head(x)


class NextWordPredictor:
    """Greedy next-word interface over a trained TinyCausalLM and its vocab."""

    def __init__(self, model: TinyCausalLM, vocab):
        self.model = model
        self.vocab = vocab

    @torch.no_grad()
    def _distribution(self, prompt) -> torch.Tensor:
        self.model.eval()
        ids = torch.tensor([self.vocab.encode(prompt)], dtype=torch.long)
        logits = self.model(ids)[0, -1]
        logits[0] = logits[1] = -math.inf  # never predict padding or unknown
        return torch.softmax(logits, dim=-1)

    def predict_next(self, prompt) -> str:
        probs = self._distribution(prompt)
        return self.vocab.words[int(torch.argmax(probs))]

    def word_probability(self, prompt, word: str) -> float:
        idx = self.vocab.index.get(word.lower())
        if idx is None or idx <= 1:
            return 0.0  # out-of-vocabulary gold counts as unpredictable
        return float(self._distribution(prompt)[idx])
