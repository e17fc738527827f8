"""Usefulness scoring for questions: a linear classifier over averaged word
embeddings, trained with hinge loss + L2 by seeded SGD.

Labels come either from human scores binarized at a threshold, or from
negative sampling: every true (context, question) pair is a positive and a
question drawn from a different context is its negative."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingTable, embed_phrase
from .textutil import tokenize


@dataclass(frozen=True)
class LabeledQuestion:
    question: str
    label: int
    provenance: str  # human_binarized | positive_pair | negative_sample

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


@dataclass
class TrainConfig:
    epochs: int = 60
    learning_rate: float = 0.5
    l2: float = 1e-3
    seed: int = 0
    decay: float = 0.2  # per-epoch step-size decay; keeps late epochs calm

    def to_json(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "seed": self.seed,
            "decay": self.decay,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainConfig":
        return cls(**obj)


@dataclass
class UsefulnessModel:
    weights: np.ndarray
    bias: float
    config: TrainConfig
    loss_history: list[float] = field(default_factory=list)

    def margin(self, features: np.ndarray) -> float:
        return float(self.weights @ features + self.bias)

    def to_json(self) -> dict:
        return {
            "dimension": int(self.weights.size),
            "weights": [float(w) for w in self.weights],
            "bias": self.bias,
            "config": self.config.to_json(),
            "loss_history": self.loss_history,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "UsefulnessModel":
        return cls(
            weights=np.array(obj["weights"], dtype=np.float64),
            bias=float(obj["bias"]),
            config=TrainConfig.from_json(obj["config"]),
            loss_history=list(obj.get("loss_history", [])),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def binarize_scores(
    scores: Sequence[tuple[str, float]], threshold: float = 3.0
) -> list[LabeledQuestion]:
    """Human usefulness scores in [0, 5] to binary labels. A score equal to
    the threshold maps to 1."""
    labeled = []
    for question, score in scores:
        if not 0.0 <= score <= 5.0:
            raise ValueError(f"score {score} for {question!r} outside [0, 5]")
        labeled.append(
            LabeledQuestion(
                question=question,
                label=1 if score >= threshold else 0,
                provenance="human_binarized",
            )
        )
    return labeled


def make_negative_samples(
    pairs: Sequence[tuple[str, str]], seed: int = 0
) -> list[LabeledQuestion]:
    """Balanced 1:1 labels from (context id, question) pairs: each true pair
    is a positive, and for each one a question from a different context is
    drawn uniformly (seeded) as a negative."""
    context_ids = {ctx for ctx, _ in pairs}
    if len(context_ids) < 2:
        raise ValueError("negative sampling needs at least two distinct contexts")
    rng = np.random.default_rng(seed)
    labeled = []
    for ctx, question in pairs:
        labeled.append(
            LabeledQuestion(question=question, label=1, provenance="positive_pair")
        )
        others = [q for other_ctx, q in pairs if other_ctx != ctx]
        negative = others[int(rng.integers(len(others)))]
        labeled.append(
            LabeledQuestion(question=negative, label=0, provenance="negative_sample")
        )
    return labeled


def question_features(table: EmbeddingTable, question: str) -> np.ndarray:
    """Bag-of-embeddings representation: mean vector of the question's
    in-vocabulary tokens (zero vector when everything is OOV)."""
    tokens = [t for t in tokenize(question) if t]
    if not tokens:
        raise ValueError("empty question")
    return embed_phrase(table, tokens).vector


def train_usefulness(
    data: Sequence[LabeledQuestion],
    table: EmbeddingTable,
    config: TrainConfig | None = None,
) -> UsefulnessModel:
    """Seeded SGD on the regularized hinge objective

        mean(max(0, 1 - y * (w.x + b))) + l2/2 * ||w||^2

    starting from zero weights. Deterministic: the same data, table, and
    config reproduce the model bit for bit."""
    config = config or TrainConfig()
    labels = {d.label for d in data}
    if labels != {0, 1}:
        raise ValueError(f"training data must contain both labels, got {sorted(labels)}")

    features = np.stack([question_features(table, d.question) for d in data])
    y = np.array([1.0 if d.label == 1 else -1.0 for d in data])
    n, dim = features.shape

    rng = np.random.default_rng(config.seed)
    w = np.zeros(dim)
    b = 0.0
    history: list[float] = []

    def objective() -> float:
        margins = 1.0 - y * (features @ w + b)
        hinge = np.maximum(margins, 0.0).mean()
        return float(hinge + 0.5 * config.l2 * (w @ w))

    for epoch in range(config.epochs):
        eta = config.learning_rate / (1.0 + config.decay * epoch)
        for i in rng.permutation(n):
            xi, yi = features[i], y[i]
            violated = yi * (w @ xi + b) < 1.0
            grad_w = config.l2 * w - (yi * xi if violated else 0.0)
            w = w - eta * grad_w
            if violated:
                b = b + eta * yi
        history.append(objective())

    return UsefulnessModel(weights=w, bias=b, config=config, loss_history=history)


def usefulness_score(model: UsefulnessModel, question: str, table: EmbeddingTable) -> float:
    """Probability-like usefulness in [0, 1]: logistic squashing of the
    linear margin (0.5 exactly at margin zero)."""
    features = question_features(table, question)
    return 1.0 / (1.0 + math.exp(-model.margin(features)))
