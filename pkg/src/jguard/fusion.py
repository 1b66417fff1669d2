"""Detection models: the guidance + classification head network over
[embedding, journalism features], and the logistic-regression baseline over
the journalism features alone.

The joint input vector is L2-normalized before the guidance head, so model
outputs are invariant under positive rescaling of the raw concatenation.
Hidden layers use rectified-linear activation; training is seeded mini-batch
gradient descent on cross-entropy with inverted dropout on the two hidden
layers and early stopping on validation AUROC.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DimensionMismatch,
    ModelFormatError,
    NumericError,
    SingleClassError,
)
from .jfeatures import FeatureVector
from .kernels import kernels_for

MODEL_FORMAT = "jguard-model-v1"


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    dropout_rate: float = 0.2
    max_epochs: int = 50
    patience: int = 5
    batch_size: int = 32
    seed: int = 42
    l2: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be >= 0")

    @classmethod
    def encoder_tuning_preset(cls, **overrides) -> "TrainConfig":
        """Schedule used when an upstream encoder is trained jointly
        (kept as a preset; head-only training wants larger steps)."""
        base = dict(learning_rate=2e-5, dropout_rate=0.2)
        base.update(overrides)
        return cls(**base)


@dataclass
class FusionModel:
    d: int
    n: int
    h1: int
    l: int
    h2: int
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    w4: np.ndarray
    b4: np.ndarray
    dropout_rate: float = 0.0
    seed: int = 0
    activation: str = "relu"

    def weights(self) -> tuple[np.ndarray, ...]:
        return (self.w1, self.b1, self.w2, self.b2, self.w3, self.b3, self.w4, self.b4)

    def copy(self) -> "FusionModel":
        return replace(self, **{k: getattr(self, k).copy() for k in
                                ("w1", "b1", "w2", "b2", "w3", "b3", "w4", "b4")})


@dataclass
class LRModel:
    weights: np.ndarray
    bias: float = 0.0


def init_model(d: int, n: int, seed: int, h1: int = 1024, l: int = 256, h2: int = 32,
               dropout_rate: float = 0.2) -> FusionModel:
    """Seeded init: weights uniform in +-1/sqrt(fan_in) drawn from PCG64 in
    layer order, biases zero."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    if h1 < d + n:
        raise ValueError(f"hidden size h1={h1} must be >= input width d+n={d + n}")
    rng = np.random.Generator(np.random.PCG64(seed))

    def layer(fan_in, fan_out):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=(fan_in, fan_out))

    return FusionModel(
        d=d, n=n, h1=h1, l=l, h2=h2,
        w1=layer(d + n, h1), b1=np.zeros(h1),
        w2=layer(h1, l), b2=np.zeros(l),
        w3=layer(l, h2), b3=np.zeros(h2),
        w4=layer(h2, 2), b4=np.zeros(2),
        dropout_rate=dropout_rate, seed=seed,
    )


def _feature_values(j) -> np.ndarray:
    if isinstance(j, FeatureVector):
        if not j.normalized:
            raise ValueError("feature vector must be normalized before fusion")
        return np.asarray(j.values, dtype=np.float64)
    return np.asarray(j, dtype=np.float64)


def normalize_joint(emb: np.ndarray, j) -> np.ndarray:
    """Concatenate and L2-normalize; the all-zero joint vector stays zero."""
    v = np.concatenate([np.asarray(emb, dtype=np.float64), _feature_values(j)])
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return v
    return v / norm


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return x / safe


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    expz = np.exp(shifted)
    return expz / expz.sum(axis=-1, keepdims=True)


def _check_dims(model: FusionModel, emb: np.ndarray, j: np.ndarray) -> None:
    if emb.shape[-1] != model.d:
        raise DimensionMismatch(f"embedding dim {emb.shape[-1]} != model d={model.d}")
    if j.shape[-1] != model.n:
        raise DimensionMismatch(f"feature dim {j.shape[-1]} != model n={model.n}")


def forward(model: FusionModel, emb: np.ndarray, j) -> tuple[np.ndarray, float]:
    """Inference pass for one example: (logits, probability of the AI class).
    Dropout is disabled; two calls on equal input are bitwise equal."""
    emb = np.asarray(emb, dtype=np.float64)
    jv = _feature_values(j)
    _check_dims(model, emb, jv)
    if not np.all(np.isfinite(emb)):
        raise NumericError("embedding contains non-finite values")
    x = normalize_joint(emb, jv).reshape(1, -1)
    k = kernels_for()
    logits = k.fusion_forward(np.ascontiguousarray(x), *model.weights())[0]
    prob_ai = float(_softmax(logits)[1])
    return logits, prob_ai


def score_batch(model: FusionModel, embs: np.ndarray, j_rows: np.ndarray) -> np.ndarray:
    """AI-class probabilities for a batch, rows normalized individually."""
    embs = np.asarray(embs, dtype=np.float64)
    j_rows = np.asarray(j_rows, dtype=np.float64)
    _check_dims(model, embs, j_rows)
    x = _normalize_rows(np.hstack([embs, j_rows]))
    k = kernels_for()
    logits = k.fusion_forward(np.ascontiguousarray(x), *model.weights())
    return _softmax(logits)[:, 1]


def loss_and_grads(model: FusionModel, x: np.ndarray, y: np.ndarray,
                   masks: tuple[np.ndarray, np.ndarray] | None = None):
    """Cross-entropy loss and analytic parameter gradients for a batch of
    already-normalized joint rows. ``masks`` carries the (h1, h2) dropout
    masks; None means no dropout."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    if masks is None:
        m1 = np.ones((x.shape[0], model.h1))
        m2 = np.ones((x.shape[0], model.h2))
    else:
        m1, m2 = (np.ascontiguousarray(m, dtype=np.float64) for m in masks)
    k = kernels_for()
    out = k.fusion_loss_grads(x, y, *model.weights(), m1, m2)
    loss, grads = out[0], out[1:]
    return float(loss), grads


def _as_training_arrays(dataset, model: FusionModel) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(dataset, tuple) and len(dataset) == 3:
        embs, j_rows, labels = dataset
    else:
        embs = np.stack([np.asarray(e, dtype=np.float64) for e, _, _ in dataset])
        j_rows = np.stack([_feature_values(j) for _, j, _ in dataset])
        labels = [lbl for _, _, lbl in dataset]
    embs = np.asarray(embs, dtype=np.float64)
    j_rows = np.asarray(j_rows, dtype=np.float64)
    _check_dims(model, embs, j_rows)
    x = _normalize_rows(np.hstack([embs, j_rows]))
    y = np.asarray(labels, dtype=np.int64)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    return np.ascontiguousarray(x), y


def _dropout_masks(rng: np.random.Generator, shape: tuple[int, int], rate: float) -> np.ndarray:
    if rate == 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= rate) / (1.0 - rate)


def train_fusion(model: FusionModel, train_set, val_set, cfg: TrainConfig,
                 history: list | None = None) -> FusionModel:
    """Mini-batch gradient descent on both heads; returns the weights of the
    best validation-AUROC epoch. Fully deterministic given cfg.seed."""
    from .evaluation import auroc

    out = model.copy()
    if cfg.max_epochs == 0:
        return out
    x_train, y_train = _as_training_arrays(train_set, model)
    x_val, y_val = _as_training_arrays(val_set, model)

    k = kernels_for()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = x_train.shape[0]
    batch_size = min(cfg.batch_size, n) if cfg.batch_size else n

    best_auroc = -np.inf
    best_weights = None
    best_epoch = 0
    params = list(out.weights())

    for epoch in range(1, cfg.max_epochs + 1):
        perm = rng.permutation(n)
        for lo in range(0, n, batch_size):
            idx = perm[lo:lo + batch_size]
            xb = np.ascontiguousarray(x_train[idx])
            yb = np.ascontiguousarray(y_train[idx])
            m1 = np.ascontiguousarray(_dropout_masks(rng, (len(idx), out.h1), cfg.dropout_rate))
            m2 = np.ascontiguousarray(_dropout_masks(rng, (len(idx), out.h2), cfg.dropout_rate))
            result = k.fusion_loss_grads(xb, yb, *params, m1, m2)
            loss, grads = result[0], result[1:]
            if not np.isfinite(loss):
                raise NumericError(f"non-finite loss at epoch {epoch}, batch start {lo}")
            for p, g in zip(params, grads):
                p -= cfg.learning_rate * g

        logits = k.fusion_forward(np.ascontiguousarray(x_val), *params)
        val_scores = _softmax(logits)[:, 1]
        val_auroc = auroc(val_scores, y_val)
        if history is not None:
            history.append((epoch, val_auroc))
        if val_auroc > best_auroc:
            best_auroc = val_auroc
            best_weights = [p.copy() for p in params]
            best_epoch = epoch
        elif epoch - best_epoch >= cfg.patience:
            break

    out.w1, out.b1, out.w2, out.b2, out.w3, out.b3, out.w4, out.b4 = best_weights
    return out


def train_lr(features, labels, cfg: TrainConfig) -> LRModel:
    """Logistic regression on normalized feature vectors by seeded (optionally
    mini-batch) gradient descent with optional L2 penalty."""
    x = np.ascontiguousarray(
        np.stack([_feature_values(f) for f in features])
        if not isinstance(features, np.ndarray) else features.astype(np.float64)
    )
    y = np.asarray(labels, dtype=np.float64)
    if x.shape[0] != y.shape[0] or x.shape[0] < 2:
        raise ValueError("need at least two labeled rows")
    if len(np.unique(y)) < 2:
        raise SingleClassError("training labels contain a single class")

    k = kernels_for()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = x.shape[0]
    batch_size = min(cfg.batch_size, n) if cfg.batch_size else n
    w = np.zeros(x.shape[1])
    b = 0.0
    for epoch in range(cfg.max_epochs):
        perm = rng.permutation(n) if batch_size < n else np.arange(n)
        for lo in range(0, n, batch_size):
            idx = perm[lo:lo + batch_size]
            loss, gw, gb = k.lr_loss_grad(
                np.ascontiguousarray(x[idx]), np.ascontiguousarray(y[idx]), w, b, cfg.l2
            )
            if not np.isfinite(loss):
                raise NumericError(f"non-finite loss at epoch {epoch + 1}")
            w = w - cfg.learning_rate * gw
            b = b - cfg.learning_rate * gb
    return LRModel(weights=w, bias=float(b))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


def score_lr_batch(model: LRModel, features: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.shape[-1] != model.weights.shape[0]:
        raise DimensionMismatch(
            f"feature dim {x.shape[-1]} != model dim {model.weights.shape[0]}")
    z = x @ model.weights + model.bias
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict_score(model, features, emb: np.ndarray | None = None) -> float:
    """Uniform scoring interface: AI-class probability in [0, 1]."""
    if isinstance(model, LRModel):
        jv = _feature_values(features)
        if jv.shape != model.weights.shape:
            raise DimensionMismatch(
                f"feature dim {jv.shape} != model dim {model.weights.shape}")
        return float(_sigmoid(float(model.weights @ jv + model.bias)))
    if isinstance(model, FusionModel):
        if emb is None:
            raise DimensionMismatch("fusion model scoring requires an embedding")
        return forward(model, emb, features)[1]
    raise TypeError(f"unsupported model type {type(model).__name__}")


def save_model(model, path: str | os.PathLike) -> None:
    if isinstance(model, FusionModel):
        doc = {
            "format": MODEL_FORMAT,
            "kind": "fusion",
            "dims": [model.d, model.n, model.h1, model.l, model.h2],
            "activation": model.activation,
            "weights": [model.w1.tolist(), model.w2.tolist(), model.w3.tolist(), model.w4.tolist()],
            "biases": [model.b1.tolist(), model.b2.tolist(), model.b3.tolist(), model.b4.tolist()],
        }
    elif isinstance(model, LRModel):
        doc = {
            "format": MODEL_FORMAT,
            "kind": "lr",
            "dims": [int(model.weights.shape[0])],
            "activation": "sigmoid",
            "weights": [model.weights.tolist()],
            "biases": [model.bias],
        }
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
        f.write("\n")


def load_model(path: str | os.PathLike):
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ModelFormatError(f"{path}: not valid JSON ({e.msg})") from e
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(
            f"{path}: expected format {MODEL_FORMAT!r}, got {doc.get('format')!r}")
    kind = doc.get("kind")
    try:
        if kind == "lr":
            (n,) = doc["dims"]
            w = np.asarray(doc["weights"][0], dtype=np.float64)
            bias = float(doc["biases"][0])
            if w.shape != (n,):
                raise ModelFormatError(f"{path}: weight shape {w.shape} != dims {n}")
            if not (np.all(np.isfinite(w)) and np.isfinite(bias)):
                raise NumericError(f"{path}: non-finite weights")
            return LRModel(weights=w, bias=bias)
        if kind == "fusion":
            d, n, h1, l, h2 = doc["dims"]
            ws = [np.asarray(m, dtype=np.float64) for m in doc["weights"]]
            bs = [np.asarray(m, dtype=np.float64) for m in doc["biases"]]
            shapes = [(d + n, h1), (h1, l), (l, h2), (h2, 2)]
            for w, shape in zip(ws, shapes):
                if w.shape != shape:
                    raise ModelFormatError(f"{path}: weight shape {w.shape} != {shape}")
            for b, width in zip(bs, (h1, l, h2, 2)):
                if b.shape != (width,):
                    raise ModelFormatError(f"{path}: bias shape {b.shape} != ({width},)")
            if not all(np.all(np.isfinite(a)) for a in ws + bs):
                raise NumericError(f"{path}: non-finite weights")
            return FusionModel(
                d=d, n=n, h1=h1, l=l, h2=h2,
                w1=ws[0], b1=bs[0], w2=ws[1], b2=bs[1],
                w3=ws[2], b3=bs[2], w4=ws[3], b4=bs[3],
                activation=doc.get("activation", "relu"),
            )
    except (KeyError, ValueError, TypeError) as e:
        raise ModelFormatError(f"{path}: malformed model document ({e})") from e
    raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
