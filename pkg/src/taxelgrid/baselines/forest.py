"""Random forest on 72-value grasp vectors: Gini trees over bootstraps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset, ShapeMismatch, SingleClass

DEFAULT_FEATURES_PER_SPLIT = 8  # floor(sqrt(72))


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    features_per_split: int = DEFAULT_FEATURES_PER_SPLIT
    bootstrap_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 when set")
        if self.features_per_split < 1:
            raise ValueError("features_per_split must be >= 1")


def _gini_pair(n0l, n1l, nl, n0r, n1r, nr):
    gl = 1.0 - (n0l / nl) ** 2 - (n1l / nl) ** 2
    gr = 1.0 - (n0r / nr) ** 2 - (n1r / nr) ** 2
    return (nl * gl + nr * gr) / (nl + nr)


def _best_split_on_feature(x, y):
    """Best (gini, threshold) splitting on one feature, or None.

    Threshold is the largest value routed left (predicate x <= threshold),
    which avoids floating midpoint ties entirely.
    """
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(xs)
    valid = xs[1:] != xs[:-1]
    if not valid.any():
        return None
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    n1l = np.cumsum(ys, dtype=np.float64)[:-1]
    n0l = nl - n1l
    total1 = float(ys.sum())
    n1r = total1 - n1l
    n0r = nr - n1r
    gini = _gini_pair(n0l, n1l, nl, n0r, n1r, nr)
    gini = np.where(valid, gini, np.inf)
    i = int(np.argmin(gini))
    return float(gini[i]), float(xs[i])


def _majority(y) -> dict:
    n1 = int(y.sum())
    n0 = len(y) - n1
    # vote tie resolves to slippery (class 1)
    return {"leaf": 0 if n0 > n1 else 1, "counts": [n0, n1]}


def _grow(X, y, depth, cfg: ForestConfig, rng) -> dict:
    if len(y) < 2 or y.min() == y.max():
        return _majority(y)
    if cfg.max_depth is not None and depth >= cfg.max_depth:
        return _majority(y)
    n_features = X.shape[1]
    k = min(cfg.features_per_split, n_features)
    order = rng.permutation(n_features)
    best = None
    # Evaluate the first k candidates; if none of them admits a valid split
    # (constant within the node), keep scanning so distinct-featured nodes
    # always split. This mirrors the usual "max_features is a lower bound"
    # forest behavior and guarantees purity at unlimited depth.
    for pos, j in enumerate(order):
        res = _best_split_on_feature(X[:, j], y)
        if res is not None:
            gini, thr = res
            if best is None or gini < best[0]:
                best = (gini, int(j), thr)
        if pos + 1 >= k and best is not None:
            break
    if best is None:
        return _majority(y)
    _, j, thr = best
    left = X[:, j] <= thr
    node = {"feature": j, "threshold": thr}
    node["left"] = _grow(X[left], y[left], depth + 1, cfg, rng)
    node["right"] = _grow(X[~left], y[~left], depth + 1, cfg, rng)
    return node


def tree_predict_one(node: dict, x) -> int:
    while "leaf" not in node:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    return node["leaf"]


def tree_predict(node: dict, X) -> np.ndarray:
    return np.array([tree_predict_one(node, row) for row in X], dtype=np.intp)


@dataclass(frozen=True)
class RandomForestModel:
    config: ForestConfig
    trees: tuple
    meta: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "kind": "forest",
            "config": {
                "n_trees": self.config.n_trees,
                "max_depth": self.config.max_depth,
                "features_per_split": self.config.features_per_split,
                "bootstrap_seed": self.config.bootstrap_seed,
            },
            "parameters": {"trees": list(self.trees)},
            "meta": self.meta,
        }

    @staticmethod
    def from_payload(doc: dict) -> "RandomForestModel":
        return RandomForestModel(
            config=ForestConfig(**doc["config"]),
            trees=tuple(doc["parameters"]["trees"]),
            meta=doc.get("meta", {}),
        )


def _as_xy(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp)
    if X.ndim != 2 or len(X) != len(y):
        raise ShapeMismatch("expected X (n, d) and y (n,)")
    return X, y


def rf_train(X, y, cfg: ForestConfig = ForestConfig()) -> RandomForestModel:
    """Grow n_trees Gini trees on bootstrap resamples; records OOB accuracy.

    Per-tree generators derive from the master seed, so growing trees in
    parallel would reproduce the sequential forest exactly.
    """
    X, y = _as_xy(X, y)
    n = len(y)
    if n == 0:
        raise EmptyDataset("forest training needs samples")
    if y.min() == y.max():
        raise SingleClass("forest training needs both classes")
    children = np.random.SeedSequence(cfg.bootstrap_seed).spawn(cfg.n_trees)
    trees = []
    oob_votes = np.zeros((n, 2), dtype=np.int64)
    for child in children:
        rng = np.random.default_rng(child)
        idx = rng.integers(0, n, size=n)
        tree = _grow(X[idx], y[idx], 0, cfg, rng)
        trees.append(tree)
        oob = np.ones(n, dtype=bool)
        oob[idx] = False
        if oob.any():
            pred = tree_predict(tree, X[oob])
            oob_votes[np.flatnonzero(oob), pred] += 1
    covered = oob_votes.sum(axis=1) > 0
    meta = {"oob_accuracy": None, "oob_coverage": float(covered.mean())}
    if covered.any():
        oob_pred = np.where(oob_votes[:, 0] > oob_votes[:, 1], 0, 1)
        meta["oob_accuracy"] = float(
            (oob_pred[covered] == y[covered]).mean()
        )
    return RandomForestModel(config=cfg, trees=tuple(trees), meta=meta)


def rf_predict(model: RandomForestModel, X) -> np.ndarray:
    """Majority vote over trees, one class index per row; ties go slippery."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    votes = np.zeros((len(X), 2), dtype=np.int64)
    for tree in model.trees:
        pred = tree_predict(tree, X)
        votes[np.arange(len(X)), pred] += 1
    return np.where(votes[:, 0] > votes[:, 1], 0, 1)
