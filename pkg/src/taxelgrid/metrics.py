"""Confusion counts and the accuracy/precision/recall/F1 family.

The positive class is stable throughout; any 0/0 ratio is defined as 0 so
degenerate folds still aggregate to finite numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyEvaluation

METRIC_NAMES = ("accuracy", "precision", "recall", "f1")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion_counts(y_true, y_pred) -> ConfusionCounts:
    """Tally a batch of class indices (0 = stable = positive)."""
    y_true = np.asarray(y_true, dtype=np.intp)
    y_pred = np.asarray(y_pred, dtype=np.intp)
    if y_true.shape != y_pred.shape:
        raise ValueError("prediction and label vectors differ in length")
    return ConfusionCounts(
        tp=int(((y_pred == 0) & (y_true == 0)).sum()),
        fp=int(((y_pred == 0) & (y_true == 1)).sum()),
        tn=int(((y_pred == 1) & (y_true == 1)).sum()),
        fn=int(((y_pred == 1) & (y_true == 0)).sum()),
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def metrics(counts: ConfusionCounts) -> dict:
    """accuracy, precision, recall and F1 as a plain dict."""
    if counts.total == 0:
        raise EmptyEvaluation("metrics need at least one evaluated sample")
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    return {
        "accuracy": _ratio(counts.tp + counts.tn, counts.total),
        "precision": precision,
        "recall": recall,
        "f1": _ratio(2.0 * precision * recall, precision + recall),
    }


def aggregate(entries) -> dict:
    """Mean and population std of each metric across folds."""
    entries = list(entries)
    if not entries:
        raise EmptyEvaluation("nothing to aggregate")
    out = {"mean": {}, "std": {}}
    for name in METRIC_NAMES:
        vals = np.array([e[name] for e in entries], dtype=np.float64)
        out["mean"][name] = float(vals.mean())
        out["std"][name] = float(vals.std())  # population (ddof=0)
    return out
