"""Training loop: seeded shuffling, minibatch Adam/SGD, epoch logging."""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigInvalid, EmptyDataset, ShapeMismatch
from ..samples import label_index
from .model import ModelSpec, Network, TrainedModel

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigInvalid("epochs must be >= 0")
        if self.batch_size < 1:
            raise ConfigInvalid("batch_size must be positive")
        if self.learning_rate <= 0:
            raise ConfigInvalid("learning_rate must be positive")
        if self.optimizer not in ("sgd", "adam"):
            raise ConfigInvalid("optimizer must be sgd or adam")


class _Sgd:
    def __init__(self, net: Network, lr: float):
        self.net = net
        self.lr = lr

    def step(self):
        for layer in self.net.layers:
            for k, g in layer.grads.items():
                layer.params[k] = layer.params[k] - self.lr * g


class _Adam:
    def __init__(self, net: Network, lr: float):
        self.net = net
        self.lr = lr
        self.t = 0
        self.m = [
            {k: np.zeros_like(v) for k, v in layer.params.items()}
            for layer in net.layers
        ]
        self.v = [
            {k: np.zeros_like(v) for k, v in layer.params.items()}
            for layer in net.layers
        ]
        self._buf = [
            {k: np.empty_like(v) for k, v in layer.params.items()}
            for layer in net.layers
        ]

    def step(self):
        # In-place updates through a scratch buffer: the moment arrays for
        # the wide FC layer are large enough that temporaries dominate the
        # step cost otherwise.
        self.t += 1
        bc1 = 1.0 - ADAM_BETA1**self.t
        bc2 = 1.0 - ADAM_BETA2**self.t
        for i, layer in enumerate(self.net.layers):
            for k, g in layer.grads.items():
                m, v, buf = self.m[i][k], self.v[i][k], self._buf[i][k]
                m *= ADAM_BETA1
                np.multiply(g, 1.0 - ADAM_BETA1, out=buf)
                m += buf
                v *= ADAM_BETA2
                np.multiply(g, g, out=buf)
                buf *= 1.0 - ADAM_BETA2
                v += buf
                np.divide(v, bc2, out=buf)
                np.sqrt(buf, out=buf)
                buf += ADAM_EPS
                np.divide(m, buf, out=buf)
                buf *= self.lr / bc1
                layer.params[k] -= buf


def stack_dataset(dataset, input_shape):
    """Samples -> (X, y) arrays; accepts PreprocessedSample or (x, label)."""
    xs, ys = [], []
    for item in dataset:
        if hasattr(item, "x"):
            x, label = item.x, item.label
        else:
            x, label = item
        x = np.asarray(x, dtype=np.float64)
        if x.shape != tuple(input_shape):
            raise ShapeMismatch(
                f"sample shape {x.shape} does not match input {input_shape}"
            )
        xs.append(x)
        ys.append(label_index(label) if isinstance(label, str) else int(label))
    return np.stack(xs), np.array(ys, dtype=np.intp)


def batch_loss_and_gradients(net: Network, X, y, dropout_rng=None):
    """Mean cross-entropy plus L2 penalty, and per-parameter gradients."""
    probs = net.forward(X, train=True, rng=dropout_rng)
    loss = net.output_layer.cross_entropy(y)
    if net.spec.l2_lambda > 0.0:
        loss += net.spec.l2_lambda * net.weight_squares()
    net.backward_from_labels(y)
    return loss, net.get_grads()


def loss_and_gradients(model: TrainedModel, batch, dropout_rng=None):
    """One-shot loss/gradient evaluation on a trained or initialized model."""
    if len(batch) == 0:
        raise EmptyDataset("loss needs a nonempty batch")
    net = model.network()
    X, y = stack_dataset(batch, model.spec.input_shape)
    return batch_loss_and_gradients(net, X, y, dropout_rng=dropout_rng)


def train(spec: ModelSpec, dataset, cfg: TrainConfig, log=None) -> TrainedModel:
    """Fit spec on the dataset. Pure function of (spec, dataset, cfg).

    ``log`` may be None, "stdout", or a CSV path; when set, one
    ``epoch,loss,train_acc`` line is emitted per epoch.
    """
    dataset = list(dataset)
    if not dataset:
        raise EmptyDataset("training needs at least one sample")
    X, y = stack_dataset(dataset, spec.input_shape)
    net = Network(spec)
    opt = (_Adam if cfg.optimizer == "adam" else _Sgd)(net, cfg.learning_rate)
    shuffle_rng = np.random.default_rng(cfg.shuffle_seed)
    dropout_rng = np.random.default_rng([spec.seed, 101])
    n = len(dataset)

    log_fh = None
    if log == "stdout":
        log_fh = sys.stdout
    elif log is not None:
        log_fh = open(log, "w", encoding="utf-8")
    try:
        if log_fh is not None:
            log_fh.write("epoch,loss,train_acc\n")
        final_loss = None
        for epoch in range(cfg.epochs):
            order = shuffle_rng.permutation(n)
            total = 0.0
            for start in range(0, n, cfg.batch_size):
                idx = order[start : start + cfg.batch_size]
                loss, _ = batch_loss_and_gradients(
                    net, X[idx], y[idx], dropout_rng=dropout_rng
                )
                opt.step()
                total += loss * len(idx)
            final_loss = total / n
            if log_fh is not None:
                probs = net.forward(X, train=False)
                pred = np.where(probs[:, 0] > probs[:, 1], 0, 1)
                acc = float((pred == y).mean())
                log_fh.write(f"{epoch},{final_loss:.6f},{acc:.6f}\n")
    finally:
        if log_fh is not None and log_fh is not sys.stdout:
            log_fh.close()

    return TrainedModel(
        spec=spec,
        parameters=tuple(net.get_params()),
        training_meta={"epochs": cfg.epochs, "final_loss": final_loss},
    )
