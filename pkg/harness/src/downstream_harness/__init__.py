"""downstream_harness: measure the training utility of fragmented releases.

Fine-tunes small models for binary classification and next-word prediction
on either a fragmented release or full training texts, evaluating both on
the same held-out full-text test set.  Consumes only the pipeline's emitted
JSONL files.
"""

__version__ = "0.1.0"

from .classify import ClassifyResult, finetune_classifier
from .data import LabeledText, SchemaError, Vocab, load_labeled_texts, load_test_sentences, tokenize
from .lm import LmEvalResult, LmTrainResult, eval_next_word, finetune_lm
from .metrics import EvalRecord, precision_recall_f1
from .models import NextWordPredictor, TinyCausalLM, TinyEncoderClassifier

__all__ = [
    "ClassifyResult",
    "EvalRecord",
    "LabeledText",
    "LmEvalResult",
    "LmTrainResult",
    "NextWordPredictor",
    "SchemaError",
    "TinyCausalLM",
    "TinyEncoderClassifier",
    "Vocab",
    "eval_next_word",
    "finetune_classifier",
    "finetune_lm",
    "load_labeled_texts",
    "load_test_sentences",
    "precision_recall_f1",
    "tokenize",
]
