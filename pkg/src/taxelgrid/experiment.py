"""Experiment orchestration: fit/evaluate under k-fold or object holdout.

Reports echo the effective config and every derived seed, carry per-fold
confusion counts, metrics and sample provenance tallies, and aggregate to
mean +/- std. Writing to a directory also emits a CSV summary row, the
trained fold models, per-epoch training logs and a metrics figure.
"""

from __future__ import annotations

import csv
import datetime
import json
import os
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import (
    ForestConfig,
    SvmConfig,
    mlp_preset,
    rf_predict,
    rf_train,
    svm_predict,
    svm_train,
)
from .dataset import load_dataset
from .errors import ConfigInvalid, EmptyDataset
from .metrics import aggregate, confusion_counts, metrics
from .nn import TrainConfig, TrainedModel, predict_indices, preset, save_model, train
from .pipeline import (
    FILL_STRATEGIES,
    PipelineConfig,
    augment_dataset,
    flatten_dataset,
    preprocess_dataset,
)
from .imaging import COMPOSE_MODES
from .samples import label_index
from .splits import kfold_split, object_holdout_split, stratified_kfold_split

CNN_MODELS = ("cnn0", "cnn1", "cnn2", "cnn3")
FLAT_MODELS = ("rf", "svm", "mlp")
MODEL_NAMES = CNN_MODELS + FLAT_MODELS

REPORT_FORMAT_VERSION = 1

SUMMARY_COLUMNS = [
    "model", "layout", "fill", "compose", "protocol", "folds_or_reps",
    "augment", "seed", "n_samples",
    "accuracy_mean", "accuracy_std", "precision_mean", "precision_std",
    "recall_mean", "recall_std", "f1_mean", "f1_std",
]


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str = "kfold"
    k: int = 10
    n_unknown: int = 6
    repetitions: int = 10

    def __post_init__(self):
        if self.kind not in ("kfold", "holdout"):
            raise ConfigInvalid(f"protocol must be kfold or holdout, "
                                f"got {self.kind!r}")
        if self.kind == "kfold" and self.k < 2:
            raise ConfigInvalid("kfold needs k >= 2")
        if self.kind == "holdout":
            if self.n_unknown < 0:
                raise ConfigInvalid("n_unknown must be >= 0")
            if self.repetitions < 1:
                raise ConfigInvalid("repetitions must be >= 1")

    def to_dict(self) -> dict:
        if self.kind == "kfold":
            return {"kind": "kfold", "k": self.k}
        return {
            "kind": "holdout",
            "n_unknown": self.n_unknown,
            "repetitions": self.repetitions,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str | None = None
    layout: str = "d1"
    fill: str = "mean"
    compose: str = "channels"
    model: str = "cnn1"
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    augment: bool = False
    stratified: bool = True
    seed: int = 0
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    dropout: float = 0.0
    l2_lambda: float = 0.0
    n_trees: int = 100
    svm_regularization: float = 1e-3
    svm_epochs: int = 200

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise ConfigInvalid(
                f"model must be one of {MODEL_NAMES}, got {self.model!r}"
            )
        if self.fill not in FILL_STRATEGIES:
            raise ConfigInvalid(f"fill must be one of {FILL_STRATEGIES}")
        if self.compose not in COMPOSE_MODES:
            raise ConfigInvalid(f"compose must be one of {COMPOSE_MODES}")
        if self.augment and self.model in FLAT_MODELS:
            raise ConfigInvalid(
                "geometric augmentation applies to tactile images; "
                f"{self.model} consumes flat vectors"
            )
        if self.dropout and self.model not in CNN_MODELS:
            raise ConfigInvalid("dropout only applies to the cnn presets")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigInvalid("dropout must be in [0, 1)")
        if self.l2_lambda < 0:
            raise ConfigInvalid("l2_lambda must be >= 0")
        # Reuses TrainConfig validation for the shared training knobs.
        TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            optimizer=self.optimizer,
        )

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "layout": self.layout,
            "fill": self.fill,
            "compose": self.compose,
            "model": self.model,
            "protocol": self.protocol.to_dict(),
            "augment": self.augment,
            "stratified": self.stratified,
            "seed": self.seed,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "optimizer": self.optimizer,
            "dropout": self.dropout,
            "l2_lambda": self.l2_lambda,
            "n_trees": self.n_trees,
            "svm_regularization": self.svm_regularization,
            "svm_epochs": self.svm_epochs,
        }


def _derive_seeds(config: ExperimentConfig) -> dict:
    """Named integer seeds for every stochastic stage, from the master."""
    rng = np.random.default_rng(config.seed)

    def draw(n=None):
        v = rng.integers(0, 2**31 - 1, size=n)
        return int(v) if n is None else [int(x) for x in v]

    n_runs = (
        config.protocol.k
        if config.protocol.kind == "kfold"
        else config.protocol.repetitions
    )
    return {
        "master": config.seed,
        "split": draw(),
        "run_model": draw(n_runs),
        "run_shuffle": draw(n_runs),
        "run_augment": draw(n_runs),
    }


def _stack(samples):
    X = np.stack([np.asarray(s.x, dtype=np.float64) for s in samples])
    y = np.array([label_index(s.label) for s in samples], dtype=np.intp)
    return X, y


def _fit(config: ExperimentConfig, train_set, model_seed: int,
         shuffle_seed: int, log=None):
    if not train_set:
        raise EmptyDataset("empty training portion")
    if config.model in CNN_MODELS or config.model == "mlp":
        if config.model == "mlp":
            spec = mlp_preset(l2_lambda=config.l2_lambda, seed=model_seed)
        else:
            spec = preset(
                config.model,
                input_shape=train_set[0].x.shape,
                l2_lambda=config.l2_lambda,
                dropout_rate=config.dropout,
                seed=model_seed,
            )
        cfg = TrainConfig(
            epochs=config.epochs,
            batch_size=config.batch_size,
            learning_rate=config.learning_rate,
            optimizer=config.optimizer,
            shuffle_seed=shuffle_seed,
        )
        return train(spec, train_set, cfg, log=log)
    X, y = _stack(train_set)
    if config.model == "rf":
        return rf_train(X, y, ForestConfig(n_trees=config.n_trees,
                                           bootstrap_seed=model_seed))
    return svm_train(X, y, SvmConfig(regularization=config.svm_regularization,
                                     epochs=config.svm_epochs,
                                     seed=model_seed))


def _predict(config: ExperimentConfig, model, eval_set) -> np.ndarray:
    X, _ = _stack(eval_set)
    if isinstance(model, TrainedModel):
        return predict_indices(model, X)
    if config.model == "rf":
        return rf_predict(model, X)
    return svm_predict(model, X)


def _provenance_tally(samples) -> dict:
    return dict(sorted(Counter(s.provenance for s in samples).items()))


def _run_one(config, index, train_set, eval_set, seeds, out_dir):
    log = None
    if out_dir is not None and (config.model in CNN_MODELS
                                or config.model == "mlp"):
        os.makedirs(os.path.join(out_dir, "logs"), exist_ok=True)
        log = os.path.join(out_dir, "logs", f"run_{index:02d}.csv")
    train_size = len(train_set)
    if config.augment:
        train_set = augment_dataset(train_set, seeds["run_augment"][index])
    model = _fit(config, train_set, seeds["run_model"][index],
                 seeds["run_shuffle"][index], log=log)
    y_pred = _predict(config, model, eval_set)
    y_true = np.array([label_index(s.label) for s in eval_set], dtype=np.intp)
    counts = confusion_counts(y_true, y_pred)
    entry = {
        "index": index,
        "train_size": train_size,
        "train_size_after_augment": len(train_set),
        "eval_size": len(eval_set),
        "train_provenance": _provenance_tally(train_set),
        "eval_provenance": _provenance_tally(eval_set),
        "confusion": counts.to_dict(),
        "metrics": metrics(counts),
        "final_loss": (
            model.training_meta.get("final_loss")
            if isinstance(model, TrainedModel)
            else None
        ),
    }
    if out_dir is not None:
        os.makedirs(os.path.join(out_dir, "models"), exist_ok=True)
        save_model(
            model, os.path.join(out_dir, "models", f"model_{index:02d}.json")
        )
    return entry


def run_experiment(config: ExperimentConfig, samples=None, out_dir=None,
                   progress=None) -> dict:
    """Execute the configured protocol; returns (and optionally writes)
    the report."""
    if samples is None:
        if config.dataset is None:
            raise ConfigInvalid("config names no dataset and none was passed")
        samples = load_dataset(config.dataset)
    samples = list(samples)
    if not samples:
        raise EmptyDataset("dataset is empty")

    if config.model in FLAT_MODELS:
        data = flatten_dataset(samples)
    else:
        data = preprocess_dataset(
            samples,
            PipelineConfig(layout=config.layout, fill=config.fill,
                           compose=config.compose),
        )
    seeds = _derive_seeds(config)
    report = {
        "format_version": REPORT_FORMAT_VERSION,
        "kind": "experiment_report",
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config.to_dict(),
        "seeds": seeds,
        "n_samples": len(data),
        "folds": [],
    }

    if config.protocol.kind == "kfold":
        labels = [label_index(s.label) for s in data]
        if config.stratified:
            folds = stratified_kfold_split(labels, config.protocol.k,
                                           seeds["split"])
        else:
            folds = kfold_split(len(data), config.protocol.k, seeds["split"])
        for i, fold in enumerate(folds):
            mask = np.zeros(len(data), dtype=bool)
            mask[fold] = True
            train_set = [data[j] for j in np.flatnonzero(~mask)]
            eval_set = [data[j] for j in fold]
            entry = _run_one(config, i, train_set, eval_set, seeds, out_dir)
            report["folds"].append(entry)
            if progress is not None:
                progress(f"fold {i}: f1={entry['metrics']['f1']:.4f}")
    else:
        known, unknown = object_holdout_split(
            data, config.protocol.n_unknown, seeds["split"]
        )
        if not unknown or not known:
            raise ConfigInvalid(
                "holdout needs nonempty known and unknown portions"
            )
        report["known_objects"] = sorted({s.object_id for s in known})
        report["unknown_objects"] = sorted({s.object_id for s in unknown})
        for r in range(config.protocol.repetitions):
            order = np.random.default_rng(
                seeds["run_shuffle"][r]
            ).permutation(len(known))
            train_set = [known[j] for j in order]
            entry = _run_one(config, r, train_set, unknown, seeds, out_dir)
            report["folds"].append(entry)
            if progress is not None:
                progress(f"repetition {r}: f1={entry['metrics']['f1']:.4f}")

    report["aggregate"] = aggregate(e["metrics"] for e in report["folds"])
    if out_dir is not None:
        write_report_artifacts(report, out_dir)
    return report


def report_bytes(report: dict, include_timestamp: bool = True) -> bytes:
    """Canonical serialization; identical seeds give identical bytes when
    the timestamp field is excluded."""
    doc = report if include_timestamp else {
        k: v for k, v in report.items() if k != "timestamp"
    }
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def summary_row(report: dict) -> list:
    cfg = report["config"]
    proto = cfg["protocol"]
    agg = report["aggregate"]
    row = [
        cfg["model"], cfg["layout"], cfg["fill"], cfg["compose"],
        proto["kind"],
        str(proto["k"] if proto["kind"] == "kfold" else proto["repetitions"]),
        str(cfg["augment"]).lower(), str(cfg["seed"]),
        str(report["n_samples"]),
    ]
    for name in ("accuracy", "precision", "recall", "f1"):
        row.append(f"{agg['mean'][name]:.6f}")
        row.append(f"{agg['std'][name]:.6f}")
    return row


def format_table_row(report: dict) -> str:
    """One line in the style of the reported result tables (percent)."""
    cfg = report["config"]
    agg = report["aggregate"]
    cells = [
        f"{cfg['model']}/{cfg['layout']}/{cfg['fill']}/{cfg['compose']}"
    ]
    for name, label in (("accuracy", "Acc"), ("precision", "Prec"),
                        ("recall", "Rec"), ("f1", "F1")):
        mean = 100.0 * agg["mean"][name]
        std = 100.0 * agg["std"][name]
        cells.append(f"{label} {mean:.1f}±{std:.1f}")
    return " | ".join(cells)


def write_report_artifacts(report: dict, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "wb") as fh:
        fh.write(report_bytes(report))
    with open(os.path.join(out_dir, "summary.csv"), "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerow(summary_row(report))
    from .render import save_metrics_figure

    figures = os.path.join(out_dir, "figures")
    os.makedirs(figures, exist_ok=True)
    save_metrics_figure(report, os.path.join(figures, "metrics_per_fold.png"))
