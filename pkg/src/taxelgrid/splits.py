"""Cross-validation folds and object-level holdout splits."""

from __future__ import annotations

import numpy as np

from .errors import KTooLarge, TooFewObjects


def kfold_split(n: int, k: int, seed: int):
    """k disjoint index arrays covering 0..n-1, sizes differing by <= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KTooLarge(f"cannot make {k} folds from {n} samples")
    perm = np.random.default_rng(seed).permutation(n)
    base, rem = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        folds.append(np.sort(perm[start : start + size]))
        start += size
    return folds


def stratified_kfold_split(labels, k: int, seed: int):
    """Like kfold_split but label proportions are balanced across folds.

    Indices of each class are shuffled then dealt round-robin, carrying the
    fold offset across classes so overall sizes still differ by <= 1.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KTooLarge(f"cannot make {k} folds from {n} samples")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    offset = 0
    for cls in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == cls)
        idx = idx[rng.permutation(len(idx))]
        for i, j in enumerate(idx):
            folds[(offset + i) % k].append(int(j))
        offset = (offset + len(idx)) % k
    return [np.sort(np.array(f, dtype=np.intp)) for f in folds]


def object_holdout_split(samples, n_unknown: int, seed: int):
    """Split by object: all samples of n_unknown random objects go unknown.

    Objects are considered in first-appearance order before shuffling, so
    the split depends only on (dataset, n_unknown, seed).
    """
    samples = list(samples)
    objects = list(dict.fromkeys(s.object_id for s in samples))
    if n_unknown > len(objects):
        raise TooFewObjects(
            f"asked for {n_unknown} unknown objects, dataset has "
            f"{len(objects)}"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(objects))
    unknown_ids = {objects[i] for i in order[:n_unknown]}
    known = [s for s in samples if s.object_id not in unknown_ids]
    unknown = [s for s in samples if s.object_id in unknown_ids]
    return known, unknown
