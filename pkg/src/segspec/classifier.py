"""Small feedforward classifier trained with Adam on feature rows.

Dense ReLU layers, a softmax output and sparse categorical cross-entropy.
Inputs are standardized with means/stds fitted on the training rows only
and stored in the model so prediction applies the same transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSplit, EmptyEval, ParseError, TooFewRows

PROB_FLOOR = 1e-12
OUTPUT_INIT_SCALE = 0.1
MODEL_MAGIC = "SEGSPEC-MLP"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 128
    epochs: int = 100
    hidden_sizes: tuple = (64, 32)
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")
        if any(h < 1 for h in self.hidden_sizes):
            raise ValueError("hidden sizes must be >= 1")


@dataclass
class MlpModel:
    weights: list
    biases: list
    feature_means: np.ndarray
    feature_stds: np.ndarray
    label_names: list = field(default_factory=list)

    @property
    def dims(self) -> list:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def n_classes(self) -> int:
        return self.weights[-1].shape[1]

    def params(self) -> list:
        return [*self.weights, *self.biases]

    def with_params(self, params) -> "MlpModel":
        k = len(self.weights)
        return MlpModel(list(params[:k]), list(params[k:]), self.feature_means,
                        self.feature_stds, self.label_names)


@dataclass
class FeatureTable:
    X: np.ndarray
    y: np.ndarray
    label_names: list
    filenames: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X must be (rows, features) with one label per row")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.label_names)):
            raise ValueError("label index out of range")

    def __len__(self):
        return self.y.size

    @classmethod
    def from_labels(cls, X, labels, filenames=None) -> "FeatureTable":
        names = sorted(set(labels))
        index = {n: i for i, n in enumerate(names)}
        return cls(X, [index[l] for l in labels], names, list(filenames or []))


def standardize_fit(X) -> tuple:
    """Column means and population stds; zero stds become 1."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 2:
        raise TooFewRows("standardization needs at least two rows")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds[stds == 0] = 1.0
    return means, stds


def init_model(input_dim: int, hidden_sizes, n_classes: int, seed: int = 0,
               feature_means=None, feature_stds=None, label_names=None) -> MlpModel:
    """He-normal weights (std ``sqrt(2 / fan_in)``), zero biases.

    The output layer is scaled by :data:`OUTPUT_INIT_SCALE` so the first
    predictions are close to uniform.
    """
    rng = np.random.default_rng(seed)
    dims = [input_dim, *hidden_sizes, n_classes]
    weights = [rng.normal(0.0, math.sqrt(2.0 / a), size=(a, b)) for a, b in zip(dims[:-1], dims[1:])]
    weights[-1] *= OUTPUT_INIT_SCALE
    biases = [np.zeros(b) for b in dims[1:]]
    means = np.zeros(input_dim) if feature_means is None else np.asarray(feature_means, dtype=np.float64)
    stds = np.ones(input_dim) if feature_stds is None else np.asarray(feature_stds, dtype=np.float64)
    return MlpModel(weights, biases, means, stds, list(label_names or []))


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward_cache(model: MlpModel, X: np.ndarray):
    a = (np.atleast_2d(X) - model.feature_means) / model.feature_stds
    acts = [a]
    pre = []
    last = len(model.weights) - 1
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = acts[-1] @ W + b
        pre.append(z)
        acts.append(z if i == last else np.maximum(z, 0.0))
    return acts, pre


def forward(model: MlpModel, X) -> np.ndarray:
    """Class probabilities for one row (1-D in, 1-D out) or a batch."""
    X = np.asarray(X, dtype=np.float64)
    acts, _ = _forward_cache(model, X)
    probs = softmax(acts[-1])
    return probs[0] if X.ndim == 1 else probs


def loss_and_grad(model: MlpModel, X, y) -> tuple:
    """Mean cross-entropy over the batch and its gradient per parameter.

    Gradients come back in :meth:`MlpModel.params` order (weights, then biases).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    n = y.size
    acts, pre = _forward_cache(model, X)
    probs = softmax(acts[-1])
    loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), y], PROB_FLOOR))))

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    gw = [None] * len(model.weights)
    gb = [None] * len(model.weights)
    for i in range(len(model.weights) - 1, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ model.weights[i].T) * (pre[i - 1] > 0)
    return loss, gw + gb


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def zeros_like(cls, params) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(params, grads, state: AdamState, config: TrainConfig = TrainConfig()) -> tuple:
    """One bias-corrected Adam update; returns new ``(params, state)``."""
    t = state.t + 1
    b1, b2 = config.beta1, config.beta2
    m = [b1 * mi + (1 - b1) * g for mi, g in zip(state.m, grads)]
    v = [b2 * vi + (1 - b2) * g * g for vi, g in zip(state.v, grads)]
    c1 = 1 - b1 ** t
    c2 = 1 - b2 ** t
    new = [p - config.lr * (mi / c1) / (np.sqrt(vi / c2) + config.eps)
           for p, mi, vi in zip(params, m, v)]
    return new, AdamState(m, v, t)


def predict(model: MlpModel, X) -> np.ndarray:
    # argmax picks the lowest index on ties
    return np.argmax(forward(model, np.atleast_2d(X)), axis=1)


def evaluate(model: MlpModel, X, y) -> float:
    y = np.asarray(y)
    if y.size == 0:
        raise EmptyEval("no rows to evaluate")
    return float(np.mean(predict(model, X) == y))


def stratified_split(y, train_fraction: float, eval_fraction: float, seed: int) -> tuple:
    """Seeded per-class shuffle; returns (train_idx, eval_idx)."""
    if not (0 < train_fraction < 1 and 0 < eval_fraction <= 1 - train_fraction + 1e-12):
        raise DegenerateSplit(f"bad split fractions {train_fraction}/{eval_fraction}")
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    train, held = [], []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        n_train = int(round(train_fraction * idx.size))
        n_eval = int(round(eval_fraction * idx.size))
        n_eval = min(n_eval, idx.size - n_train)
        if n_train < 1:
            raise DegenerateSplit(f"class {c} has no training rows")
        train.extend(idx[:n_train])
        held.extend(idx[n_train:n_train + n_eval])
    if not held:
        raise DegenerateSplit("evaluation split is empty")
    return np.sort(np.array(train)), np.sort(np.array(held))


@dataclass
class TrainResult:
    model: MlpModel
    history: list
    train_idx: np.ndarray
    eval_idx: np.ndarray

    @property
    def eval_accuracy(self) -> float:
        return self.history[-1]["eval_accuracy"]


def train(table: FeatureTable, split=(0.8, 0.2), config: TrainConfig = TrainConfig()) -> TrainResult:
    """Fixed-epoch mini-batch training; eval rows never touch the fit.

    ``history`` holds one dict per epoch with the mean training loss and
    the train/eval accuracy after that epoch.
    """
    if len(table) < 4:
        raise TooFewRows(f"need at least 4 rows, got {len(table)}")
    n_classes = len(table.label_names)
    if n_classes < 2:
        raise TooFewRows("need at least two classes")
    train_idx, eval_idx = stratified_split(table.y, split[0], split[1], config.seed)
    Xtr, ytr = table.X[train_idx], table.y[train_idx]
    Xev, yev = table.X[eval_idx], table.y[eval_idx]
    means, stds = standardize_fit(Xtr)
    model = init_model(table.X.shape[1], config.hidden_sizes, n_classes, config.seed,
                       means, stds, table.label_names)
    params = model.params()
    state = AdamState.zeros_like(params)
    rng = np.random.default_rng(config.seed + 1)
    history = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(ytr.size)
        losses, weights = [], []
        for start in range(0, order.size, config.batch_size):
            batch = order[start:start + config.batch_size]
            loss, grads = loss_and_grad(model, Xtr[batch], ytr[batch])
            params, state = adam_step(params, grads, state, config)
            model = model.with_params(params)
            losses.append(loss)
            weights.append(batch.size)
        history.append({
            "epoch": epoch,
            "loss": float(np.average(losses, weights=weights)),
            "train_accuracy": evaluate(model, Xtr, ytr),
            "eval_accuracy": evaluate(model, Xev, yev),
        })
    return TrainResult(model, history, train_idx, eval_idx)


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.ravel(values))


def dumps_model(model: MlpModel) -> str:
    """Text format: magic/version, dims, labels, means, stds, then per
    layer its weight matrix (row-major, one input row per line) and bias."""
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION}",
             "dims " + " ".join(str(d) for d in model.dims),
             "labels " + " ".join(model.label_names),
             "means " + _fmt(model.feature_means),
             "stds " + _fmt(model.feature_stds)]
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        lines.append(f"layer {i}")
        lines.extend(_fmt(row) for row in W)
        lines.append("bias " + _fmt(b))
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> MlpModel:
    lines = text.splitlines()
    try:
        magic, version = lines[0].split()
        if magic != MODEL_MAGIC or int(version) != MODEL_VERSION:
            raise ParseError(f"not a version-{MODEL_VERSION} model file")
        dims = [int(d) for d in lines[1].split()[1:]]
        labels = lines[2].split()[1:]
        means = np.array([float(v) for v in lines[3].split()[1:]])
        stds = np.array([float(v) for v in lines[4].split()[1:]])
        pos = 5
        weights, biases = [], []
        for a, b in zip(dims[:-1], dims[1:]):
            pos += 1  # "layer i"
            W = np.array([[float(v) for v in lines[pos + r].split()] for r in range(a)])
            pos += a
            bias = np.array([float(v) for v in lines[pos].split()[1:]])
            pos += 1
            if W.shape != (a, b) or bias.shape != (b,):
                raise ParseError("layer shape does not match dims header")
            weights.append(W)
            biases.append(bias)
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed model file: {exc}") from None
    return MlpModel(weights, biases, means, stds, labels)


def save_model(path, model: MlpModel) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> MlpModel:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
