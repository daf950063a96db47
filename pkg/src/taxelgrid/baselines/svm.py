"""Linear SVM trained by seeded stochastic subgradient descent.

Objective: lambda * ||w||^2 + mean hinge loss, bias unregularized. Steps
follow the classic 1/(2*lambda*t) schedule, one shuffled sample per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset, ShapeMismatch, SingleClass


@dataclass(frozen=True)
class SvmConfig:
    regularization: float = 1e-3
    epochs: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.regularization <= 0:
            raise ValueError("regularization must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class LinearModel:
    w: np.ndarray = field(repr=False)
    b: float
    config: SvmConfig = SvmConfig()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.w.setflags(write=False)

    def to_payload(self) -> dict:
        return {
            "kind": "linear_svm",
            "config": {
                "regularization": self.config.regularization,
                "epochs": self.config.epochs,
                "seed": self.config.seed,
            },
            "parameters": {"w": [float(v) for v in self.w], "b": float(self.b)},
            "meta": self.meta,
        }

    @staticmethod
    def from_payload(doc: dict) -> "LinearModel":
        return LinearModel(
            w=np.array(doc["parameters"]["w"], dtype=np.float64),
            b=float(doc["parameters"]["b"]),
            config=SvmConfig(**doc["config"]),
            meta=doc.get("meta", {}),
        )


def _signs(y) -> np.ndarray:
    # stable (class 0) is the positive class
    return np.where(np.asarray(y) == 0, 1.0, -1.0)


def hinge_objective(w, b, X, y, lam: float) -> float:
    """Brute regularized hinge objective; also the training target."""
    s = _signs(y)
    margins = s * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return float(lam * (w @ w) + hinge.mean())


def svm_train(X, y, cfg: SvmConfig = SvmConfig()) -> LinearModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp)
    if X.ndim != 2 or len(X) != len(y):
        raise ShapeMismatch("expected X (n, d) and y (n,)")
    if len(y) == 0:
        raise EmptyDataset("svm training needs samples")
    if y.min() == y.max():
        raise SingleClass("svm training needs both classes")
    s = _signs(y)
    n, d = X.shape
    lam = cfg.regularization
    rng = np.random.default_rng(cfg.seed)
    w = np.zeros(d)
    b = 0.0
    t = 0
    history = [hinge_objective(w, b, X, y, lam)]
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for i in order:
            t += 1
            eta = 1.0 / (2.0 * lam * t)
            violated = s[i] * (X[i] @ w + b) < 1.0
            w *= 1.0 - 1.0 / t  # (1 - eta * 2 lam) with this schedule
            if violated:
                w += eta * s[i] * X[i]
                b += eta * s[i]
        history.append(hinge_objective(w, b, X, y, lam))
    return LinearModel(
        w=w, b=b, config=cfg, meta={"objective_history": history}
    )


def svm_decision(model: LinearModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return X @ model.w + model.b


def svm_predict(model: LinearModel, X) -> np.ndarray:
    """Class index per row: positive margin is stable, ties go slippery."""
    return np.where(svm_decision(model, X) > 0.0, 0, 1)
