"""Dense feedforward network baseline, implemented directly on numpy.

The default architecture takes a raw length-2000 time series and maps it
through hidden layers of 5000, 500, 100 and 30 units to a 2-way softmax.
Training is plain minibatch Adam on cross-entropy. The network exists as
a comparison point for the prototype classifier and as a source of
compact hidden representations (the 30-unit layer) for causality
analysis, so the forward pass exposes every layer's activations.

Training runs in float32 for speed; the analytic gradients are validated
against float64 central differences in gradient_check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .chaosnet import EvaluationReport, classification_report

_ACTIVATIONS = ("sigmoid", "relu", "softmax")


@dataclass(frozen=True)
class MlpConfig:
    """Architecture and training hyperparameters.

    activations has one entry per non-input layer; the output activation
    must be softmax since the loss is categorical cross-entropy.
    """

    layer_sizes: tuple = (2000, 5000, 500, 100, 30, 2)
    activations: tuple = ("sigmoid", "relu", "relu", "relu", "softmax")
    learning_rate: float = 1e-4
    batch_size: int = 32
    n_epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least an input and an output layer")
        if any(int(s) < 1 for s in self.layer_sizes):
            raise ValueError("layer sizes must be positive")
        if len(self.activations) != len(self.layer_sizes) - 1:
            raise ValueError(
                f"expected {len(self.layer_sizes) - 1} activations, "
                f"got {len(self.activations)}"
            )
        for name in self.activations:
            if name not in _ACTIVATIONS:
                raise ValueError(f"unknown activation {name!r}")
        if self.activations[-1] != "softmax":
            raise ValueError("output activation must be softmax")
        if "softmax" in self.activations[:-1]:
            raise ValueError("softmax is only valid on the output layer")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1 or self.n_epochs < 1:
            raise ValueError("batch_size and n_epochs must be >= 1")

    @property
    def n_classes(self) -> int:
        return int(self.layer_sizes[-1])


@dataclass
class MlpModel:
    config: MlpConfig
    weights: list = field(repr=False, default_factory=list)
    biases: list = field(repr=False, default_factory=list)
    loss_curve: np.ndarray | None = None


def init_mlp(config: MlpConfig, dtype=np.float32) -> MlpModel:
    """Glorot-uniform weights, zero biases, drawn from one seeded stream."""
    rng = np.random.default_rng(config.seed)
    weights = []
    biases = []
    sizes = config.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return MlpModel(config, weights, biases)


def _apply_activation(z: np.ndarray, name: str) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "sigmoid":
        return expit(z)
    # softmax, shifted for stability
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def forward_all(model: MlpModel, instances: np.ndarray) -> list:
    """Activations of every layer, input first, softmax output last."""
    x = np.asarray(instances)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.config.layer_sizes[0]:
        raise ValueError(
            f"expected input width {model.config.layer_sizes[0]}, got {x.shape[1]}"
        )
    a = x.astype(model.weights[0].dtype, copy=False)
    acts = [a]
    for w, b, name in zip(model.weights, model.biases, model.config.activations):
        a = _apply_activation(a @ w + b, name)
        acts.append(a)
    return acts


def predict_proba(model: MlpModel, instances: np.ndarray) -> np.ndarray:
    return forward_all(model, instances)[-1]


def predict_mlp(model: MlpModel, instances: np.ndarray) -> np.ndarray:
    return np.argmax(predict_proba(model, instances), axis=1)


def hidden_activations(model: MlpModel, instances: np.ndarray, layer: int = -2) -> np.ndarray:
    """Activations of one layer for each instance.

    layer indexes the activation stack where 0 is the input and -1 the
    softmax output; the default -2 is the last hidden layer (30 units in
    the stock architecture).
    """
    acts = forward_all(model, instances)
    return acts[layer]


def _cross_entropy(probs: np.ndarray, onehot: np.ndarray) -> float:
    p = np.maximum(probs, 1e-30)
    return float(-(onehot * np.log(p)).sum() / probs.shape[0])


def _gradients(model: MlpModel, batch: np.ndarray, onehot: np.ndarray):
    """Cross-entropy loss and its gradients for one batch."""
    acts = forward_all(model, batch)
    probs = acts[-1]
    loss = _cross_entropy(probs, onehot)
    n = batch.shape[0]
    delta = (probs - onehot.astype(probs.dtype)) / n
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for layer in range(len(model.weights) - 1, -1, -1):
        a_prev = acts[layer]
        grads_w[layer] = a_prev.T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer == 0:
            break
        back = delta @ model.weights[layer].T
        name = model.config.activations[layer - 1]
        if name == "relu":
            delta = back * (a_prev > 0)
        else:  # sigmoid
            delta = back * a_prev * (1.0 - a_prev)
    return loss, grads_w, grads_b


def train_mlp(
    instances: np.ndarray,
    labels: np.ndarray,
    config: MlpConfig = MlpConfig(),
    dtype=np.float32,
) -> MlpModel:
    """Minibatch Adam on cross-entropy; returns the model with its loss curve.

    Shuffling, initialization and therefore the whole run are determined
    by config.seed. Raises if the loss stops being finite.
    """
    x = np.asarray(instances, dtype=dtype)
    y = np.asarray(labels)
    if x.ndim != 2:
        raise ValueError("instances must be 2D (n_instances, width)")
    if x.shape[0] != y.shape[0]:
        raise ValueError("instances and labels disagree on count")
    if x.shape[0] == 0:
        raise ValueError("no training instances")
    n_classes = config.n_classes
    if y.min() < 0 or y.max() >= n_classes:
        raise ValueError(f"labels must lie in [0, {n_classes})")
    onehot = np.eye(n_classes, dtype=dtype)[y]

    model = init_mlp(config, dtype=dtype)
    rng = np.random.default_rng(config.seed)
    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    lr = config.learning_rate
    step = 0
    curve = np.empty(config.n_epochs)
    n = x.shape[0]
    for epoch in range(config.n_epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            loss, gw, gb = _gradients(model, x[idx], onehot[idx])
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"training diverged at epoch {epoch} (non-finite loss)"
                )
            epoch_losses.append(loss)
            step += 1
            corr1 = 1.0 - beta1**step
            corr2 = 1.0 - beta2**step
            for i in range(len(model.weights)):
                m_w[i] = beta1 * m_w[i] + (1 - beta1) * gw[i]
                v_w[i] = beta2 * v_w[i] + (1 - beta2) * gw[i] ** 2
                model.weights[i] -= lr * (m_w[i] / corr1) / (np.sqrt(v_w[i] / corr2) + eps)
                m_b[i] = beta1 * m_b[i] + (1 - beta1) * gb[i]
                v_b[i] = beta2 * v_b[i] + (1 - beta2) * gb[i] ** 2
                model.biases[i] -= lr * (m_b[i] / corr1) / (np.sqrt(v_b[i] / corr2) + eps)
        curve[epoch] = np.mean(epoch_losses)
    model.loss_curve = curve
    return model


def evaluate_mlp(model: MlpModel, instances: np.ndarray, labels: np.ndarray) -> EvaluationReport:
    predicted = predict_mlp(model, instances)
    return classification_report(np.asarray(labels), predicted, model.config.n_classes)


def gradient_check(
    model: MlpModel,
    instances: np.ndarray,
    labels: np.ndarray,
    step: float = 1e-6,
) -> float:
    """Largest relative error between analytic and central-difference gradients.

    Perturbs every parameter, so keep the model small. The model must be
    float64 for the differences to resolve.
    """
    if model.weights[0].dtype != np.float64:
        raise ValueError("gradient_check needs a float64 model")
    x = np.asarray(instances, dtype=np.float64)
    y = np.asarray(labels)
    onehot = np.eye(model.config.n_classes)[y]
    _, grads_w, grads_b = _gradients(model, x, onehot)

    def loss_at() -> float:
        probs = forward_all(model, x)[-1]
        return _cross_entropy(probs, onehot)

    worst = 0.0
    for params, grads in ((model.weights, grads_w), (model.biases, grads_b)):
        for arr, grad in zip(params, grads):
            flat = arr.ravel()
            gflat = grad.ravel()
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                up = loss_at()
                flat[i] = orig - step
                down = loss_at()
                flat[i] = orig
                numeric = (up - down) / (2.0 * step)
                scale = max(abs(numeric), abs(gflat[i]), 1e-12)
                worst = max(worst, abs(numeric - gflat[i]) / scale)
    return worst


def save_mlp(path, model: MlpModel) -> None:
    payload = {
        "layer_sizes": np.asarray(model.config.layer_sizes, dtype=np.int64),
        "activations": np.asarray(model.config.activations),
        "learning_rate": model.config.learning_rate,
        "batch_size": model.config.batch_size,
        "n_epochs": model.config.n_epochs,
        "seed": model.config.seed,
    }
    if model.loss_curve is not None:
        payload["loss_curve"] = model.loss_curve
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        payload[f"w{i}"] = w
        payload[f"b{i}"] = b
    np.savez(path, **payload)


def load_mlp(path) -> MlpModel:
    with np.load(path, allow_pickle=False) as data:
        config = MlpConfig(
            layer_sizes=tuple(int(s) for s in data["layer_sizes"]),
            activations=tuple(str(a) for a in data["activations"]),
            learning_rate=float(data["learning_rate"]),
            batch_size=int(data["batch_size"]),
            n_epochs=int(data["n_epochs"]),
            seed=int(data["seed"]),
        )
        n_layers = len(config.layer_sizes) - 1
        weights = [data[f"w{i}"] for i in range(n_layers)]
        biases = [data[f"b{i}"] for i in range(n_layers)]
        curve = data["loss_curve"] if "loss_curve" in data else None
    return MlpModel(config, weights, biases, curve)
