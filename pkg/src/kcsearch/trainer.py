"""Compact feedforward binary classifier written directly in numpy.

Weights follow the ``(fan_out, fan_in)`` convention, so a batch ``X`` of
shape ``(n, fan_in)`` maps to ``X @ W.T + b``.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from .oracle import EvalRecord, Oracle
from .scoring import ScoreParams, k_completeness
from .search_space import Architecture, GridPoint, SearchSpace

ACTIVATIONS = ("relu", "sigmoid", "tanh")
OPTIMIZERS = ("sgd", "adam")
_EPS = np.finfo(float).eps


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 42
    split_fraction: float = 0.8
    hidden_activation: str = "relu"
    optimizer: str = "adam"

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.split_fraction < 1.0:
            raise ValueError("split_fraction must be in (0, 1)")
        if self.hidden_activation not in ACTIVATIONS:
            raise ValueError(f"hidden_activation must be one of {ACTIVATIONS}")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")


@dataclass
class MlpModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "relu"

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def parameters(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]


def init_model(architecture: Architecture, seed: int, activation: str = "relu") -> MlpModel:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases."""
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    rng = np.random.default_rng(seed)
    return _init(architecture.layer_sizes, rng, activation)


def _init(sizes, rng, activation) -> MlpModel:
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases, activation)


def _act(name, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "sigmoid":
        return expit(z)
    return np.tanh(z)


def _act_grad(name, a):
    # derivative written in terms of the activation output
    if name == "relu":
        return (a > 0).astype(float)
    if name == "sigmoid":
        return a * (1.0 - a)
    return 1.0 - a * a


def _forward(model: MlpModel, X: np.ndarray):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.layer_sizes[0]:
        raise ValueError(f"expected batch with {model.layer_sizes[0]} columns, got shape {X.shape}")
    acts = [X]
    a = X
    last = len(model.weights) - 1
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ W.T + b
        if k == last:
            return acts, z[:, 0]
        a = _act(model.activation, z)
        acts.append(a)


def forward(model: MlpModel, batch: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Returns the per-layer activations (input first) and output probabilities."""
    acts, logits = _forward(model, batch)
    return acts, np.clip(expit(logits), _EPS, 1.0 - _EPS)


def bce_loss(logits: np.ndarray, y: np.ndarray) -> float:
    # log(1 + e^z) - y z  ==  -[y log p + (1-y) log(1-p)]
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def loss_and_gradients(model: MlpModel, X: np.ndarray, y: np.ndarray):
    """Mean binary cross-entropy and its gradients for every weight and bias."""
    y = np.asarray(y, dtype=float)
    acts, logits = _forward(model, X)
    loss = bce_loss(logits, y)
    delta = ((expit(logits) - y) / len(y))[:, None]
    gw = [None] * len(model.weights)
    gb = [None] * len(model.biases)
    for k in range(len(model.weights) - 1, -1, -1):
        gw[k] = delta.T @ acts[k]
        gb[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k]) * _act_grad(model.activation, acts[k])
    return loss, gw, gb


def predict(model: MlpModel, X: np.ndarray) -> np.ndarray:
    _, p = forward(model, X)
    return (p >= 0.5).astype(int)


def accuracy(model: MlpModel, X: np.ndarray, y: np.ndarray) -> float:
    if len(y) == 0:
        raise ValueError("accuracy of an empty set")
    return float(np.mean(predict(model, X) == np.asarray(y)))


class _Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.b1 ** self.t
        c2 = 1.0 - self.b2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class _Sgd:
    def __init__(self, params, lr):
        self.lr = lr

    def step(self, params, grads):
        for p, g in zip(params, grads):
            p -= self.lr * g


def candidate_rng(seed: int, point: GridPoint) -> np.random.Generator:
    # one stream per (seed, cell) so evaluation order cannot change results
    return np.random.default_rng([seed, point.ihls, point.df])


def fit(model: MlpModel, X: np.ndarray, y: np.ndarray, config: TrainConfig,
        rng: np.random.Generator) -> tuple[list[float], list[float]]:
    """Train in place; returns per-epoch (loss, accuracy) over the training rows."""
    n = len(y)
    if n == 0:
        raise ValueError("empty training set")
    params = model.parameters()
    opt = _Adam(params, config.learning_rate) if config.optimizer == "adam" else _Sgd(params, config.learning_rate)
    losses, accs = [], []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for s in range(0, n, config.batch_size):
            idx = order[s:s + config.batch_size]
            loss, gw, gb = loss_and_gradients(model, X[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch} (batch starting at {s})")
            opt.step(params, [*gw, *gb])
        _, logits = _forward(model, X)
        loss = bce_loss(logits, y)
        if not np.isfinite(loss):
            raise TrainingError(f"non-finite loss at epoch {epoch}")
        losses.append(loss)
        accs.append(float(np.mean((logits >= 0.0) == (y == 1))))
    return losses, accs


def train_and_evaluate(architecture: Architecture, dataset, config: TrainConfig = TrainConfig(),
                       alpha: float = 0.5) -> EvalRecord:
    """Build, train and score the network for one grid cell."""
    t0 = time.perf_counter()
    X = dataset.features
    if architecture.input_dim != X.shape[1]:
        raise ValueError(f"architecture expects {architecture.input_dim} inputs, dataset has {X.shape[1]}")
    tr, te = dataset.train_indices, dataset.test_indices
    if len(tr) == 0 or len(te) == 0:
        raise ValueError("train and test splits must both be non-empty")
    y = dataset.labels.astype(float)

    rng = candidate_rng(config.seed, architecture.origin)
    model = _init(architecture.layer_sizes, rng, config.hidden_activation)
    losses, accs = fit(model, X[tr], y[tr], config, rng)

    origin = architecture.origin
    score = k_completeness(origin.ihls, origin.df, ScoreParams(architecture.input_dim, alpha))
    return EvalRecord(
        point=origin,
        architecture=architecture,
        train_accuracy=accuracy(model, X[tr], y[tr]),
        test_accuracy=accuracy(model, X[te], y[te]),
        k_completeness=score,
        loss_history=tuple(losses),
        accuracy_history=tuple(accs),
        duration=time.perf_counter() - t0,
    )


class MlpOracle(Oracle):
    """Trains a fresh network for each grid cell it is asked about."""

    def __init__(self, space: SearchSpace, dataset, config: TrainConfig = TrainConfig(),
                 alpha: float = 0.5):
        if dataset.features.shape[1] != space.input_dim:
            raise ValueError(
                f"search space input_dim {space.input_dim} != dataset width {dataset.features.shape[1]}")
        super().__init__(space, alpha)
        self.dataset = dataset
        self.config = config

    def _evaluate(self, point: GridPoint) -> EvalRecord:
        return train_and_evaluate(self.space.architecture(point), self.dataset, self.config,
                                  self.params.alpha)


def write_history_csv(record: EvalRecord, path) -> Path:
    """Per-epoch loss and accuracy as ``epoch,loss,accuracy`` rows."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "loss", "accuracy"])
        for e, (loss, acc) in enumerate(zip(record.loss_history, record.accuracy_history), start=1):
            w.writerow([e, repr(loss), repr(acc)])
    return path
