"""Evaluation records and hand-verifiable metric computations."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

TASKS = ("classification", "lm")
VARIANTS = ("full", "frag")


@dataclass(frozen=True)
class EvalRecord:
    task: str
    data_variant: str
    metrics: Mapping[str, float]

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}")
        if self.data_variant not in VARIANTS:
            raise ValueError(f"data_variant must be one of {VARIANTS}")
        for name, value in self.metrics.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"metric {name}={value} outside [0, 1]")

    def to_json(self) -> str:
        return json.dumps(
            {"task": self.task, "data_variant": self.data_variant, "metrics": dict(sorted(self.metrics.items()))},
            sort_keys=True,
        )


def precision_recall_f1(
    y_true: Sequence[str], y_pred: Sequence[str], positive: str = "case"
) -> dict[str, float]:
    """Binary precision/recall/F1 for the positive class; zero when undefined."""
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred must have equal length")
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == positive and p == positive)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t != positive and p == positive)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == positive and p != positive)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}
