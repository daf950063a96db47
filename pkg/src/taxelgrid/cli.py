"""Command-line front end: convert, cv, holdout, synth, gradcheck, render."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .dataset import SynthConfig, generate_synthetic, load_dataset, save_dataset
from .errors import ConfigInvalid, TaxelGridError
from .experiment import (
    ExperimentConfig,
    ProtocolConfig,
    format_table_row,
    run_experiment,
)
from .nn.gradcheck import gradient_check, small_spec
from .pipeline import PipelineConfig, preprocess_sample
from .render import save_image_png, save_pgm

COMPOSE_ALIASES = {
    "h": "horizontal",
    "v": "vertical",
    "c": "channels",
    "horizontal": "horizontal",
    "vertical": "vertical",
    "channels": "channels",
}

CONFIG_FILE_KEYS = {
    "dataset", "layout", "fill", "compose", "model", "protocol", "augment",
    "stratified", "seed", "epochs", "batch_size", "learning_rate",
    "optimizer", "dropout", "l2_lambda", "n_trees", "svm_regularization",
    "svm_epochs", "out",
}
PROTOCOL_KEYS = {"kind", "k", "n_unknown", "repetitions"}


def load_config_file(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{path}: not valid JSON ({exc})")
    if not isinstance(doc, dict):
        raise ConfigInvalid(f"{path}: config must be a JSON object")
    unknown = set(doc) - CONFIG_FILE_KEYS
    if unknown:
        raise ConfigInvalid(f"{path}: unknown config keys {sorted(unknown)}")
    proto = doc.get("protocol")
    if proto is not None:
        if not isinstance(proto, dict):
            raise ConfigInvalid(f"{path}: protocol must be an object")
        bad = set(proto) - PROTOCOL_KEYS
        if bad:
            raise ConfigInvalid(f"{path}: unknown protocol keys {sorted(bad)}")
    return doc


def _pick(flag_value, file_cfg: dict, key: str, default):
    """Flags beat the config file; the config file beats defaults."""
    if flag_value is not None:
        return flag_value
    if key in file_cfg and file_cfg[key] is not None:
        return file_cfg[key]
    return default


def _experiment_config(args, kind: str) -> ExperimentConfig:
    file_cfg = load_config_file(args.config) if args.config else {}
    file_proto = file_cfg.get("protocol") or {}
    if file_proto.get("kind") not in (None, kind):
        raise ConfigInvalid(
            f"config file protocol is {file_proto.get('kind')!r}, "
            f"but the {kind} command was invoked"
        )
    compose = _pick(args.compose, file_cfg, "compose", "channels")
    if compose not in COMPOSE_ALIASES:
        raise ConfigInvalid(f"unknown composition {compose!r}")
    if kind == "kfold":
        protocol = ProtocolConfig(
            kind="kfold", k=_pick(args.k, file_proto, "k", 10)
        )
    else:
        protocol = ProtocolConfig(
            kind="holdout",
            n_unknown=_pick(args.n_unknown, file_proto, "n_unknown", 6),
            repetitions=_pick(args.repetitions, file_proto, "repetitions", 10),
        )
    augment = args.augment or bool(file_cfg.get("augment", False))
    stratified = not args.no_stratify and bool(file_cfg.get("stratified", True))
    return ExperimentConfig(
        dataset=_pick(args.dataset, file_cfg, "dataset", None),
        layout=_pick(args.layout, file_cfg, "layout", "d1"),
        fill=_pick(args.fill, file_cfg, "fill", "mean"),
        compose=COMPOSE_ALIASES[compose],
        model=_pick(args.model, file_cfg, "model", "cnn1"),
        protocol=protocol,
        augment=augment,
        stratified=stratified,
        seed=_pick(args.seed, file_cfg, "seed", 0),
        epochs=_pick(args.epochs, file_cfg, "epochs", 100),
        batch_size=_pick(args.batch_size, file_cfg, "batch_size", 32),
        learning_rate=_pick(args.learning_rate, file_cfg, "learning_rate",
                            1e-3),
        optimizer=_pick(args.optimizer, file_cfg, "optimizer", "adam"),
        dropout=_pick(args.dropout, file_cfg, "dropout", 0.0),
        l2_lambda=_pick(args.l2, file_cfg, "l2_lambda", 0.0),
        n_trees=_pick(args.n_trees, file_cfg, "n_trees", 100),
        svm_regularization=_pick(None, file_cfg, "svm_regularization", 1e-3),
        svm_epochs=_pick(None, file_cfg, "svm_epochs", 200),
    ), _pick(args.out, file_cfg, "out", None)


def _add_pipeline_flags(p):
    p.add_argument("--dataset", help="dataset CSV path")
    p.add_argument("--layout", help="d1, d2, d3 or a layout file path")
    p.add_argument("--fill", choices=["min", "mean"])
    p.add_argument("--compose", choices=sorted(COMPOSE_ALIASES))


def _add_experiment_flags(p):
    _add_pipeline_flags(p)
    p.add_argument("--model",
                   choices=["cnn0", "cnn1", "cnn2", "cnn3", "rf", "svm", "mlp"])
    p.add_argument("--seed", type=int)
    p.add_argument("--augment", action="store_true",
                   help="quadruple the training portion with flips/rotations")
    p.add_argument("--no-stratify", action="store_true",
                   help="plain instead of label-stratified folds")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--optimizer", choices=["sgd", "adam"])
    p.add_argument("--dropout", type=float)
    p.add_argument("--l2", type=float)
    p.add_argument("--n-trees", type=int, dest="n_trees")
    p.add_argument("--config", help="JSON config file; flags take precedence")
    p.add_argument("--out", help="directory for report, summary, figures")


def cmd_convert(args) -> int:
    config = PipelineConfig(
        layout=args.layout or "d1",
        fill=args.fill or "mean",
        compose=COMPOSE_ALIASES[args.compose or "channels"],
    )
    layout = config.resolve_layout()
    samples = load_dataset(args.dataset)
    os.makedirs(args.out, exist_ok=True)
    written = 0
    for sample in samples:
        pre = preprocess_sample(sample, config, layout=layout)
        if pre.x.shape[2] == 1:
            path = os.path.join(args.out, f"{sample.sample_id}.pgm")
            save_pgm(pre.x, path)
        else:
            path = os.path.join(args.out, f"{sample.sample_id}.npy")
            np.save(path, pre.x)
        written += 1
    print(f"wrote {written} tactile images to {args.out}")
    return 0


def cmd_cv(args) -> int:
    config, out = _experiment_config(args, "kfold")
    report = run_experiment(
        config, out_dir=out,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    print(format_table_row(report))
    if out:
        print(f"artifacts written to {out}")
    return 0


def cmd_holdout(args) -> int:
    config, out = _experiment_config(args, "holdout")
    report = run_experiment(
        config, out_dir=out,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    print(format_table_row(report))
    if config.augment:
        f0 = report["folds"][0]
        print(
            f"augmented training: {f0['train_size']} -> "
            f"{f0['train_size_after_augment']} samples"
        )
    if out:
        print(f"artifacts written to {out}")
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        n_objects=args.objects,
        samples_per_object=args.samples_per_object,
        class_separation=args.separation,
        noise_std=args.noise,
        seed=args.seed,
    )
    samples = generate_synthetic(cfg)
    save_dataset(samples, args.out)
    print(f"wrote {len(samples)} samples ({cfg.n_objects} objects) to {args.out}")
    return 0


def cmd_gradcheck(args) -> int:
    spec = small_spec(args.arch, seed=args.seed)
    report = gradient_check(spec, tolerance=args.tol)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def cmd_render(args) -> int:
    data = np.load(args.input)
    if data.ndim == 3 and data.shape[2] > 1:
        # channels side by side in one PGM
        grid = np.concatenate([data[:, :, c] for c in range(data.shape[2])],
                              axis=1)
    elif data.ndim == 3:
        grid = data[:, :, 0]
    else:
        grid = data
    save_pgm(grid, args.out)
    if args.png:
        save_image_png(data, args.png)
    print(f"rendered {args.input} -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taxelgrid",
        description="Tactile images from 24-electrode readings and "
                    "grasp stability classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert",
                       help="write per-sample tactile images (PGM or npy)")
    _add_pipeline_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("cv", help="k-fold cross-validation experiment")
    _add_experiment_flags(p)
    p.add_argument("--k", type=int, help="number of folds (default 10)")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("holdout",
                       help="unknown-object generalization experiment")
    _add_experiment_flags(p)
    p.add_argument("--n-unknown", type=int, dest="n_unknown",
                   help="objects held out entirely (default 6)")
    p.add_argument("--repetitions", type=int, help="retrain count (default 10)")
    p.set_defaults(func=cmd_holdout)

    p = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    p.add_argument("--objects", type=int, default=41)
    p.add_argument("--samples-per-object", type=int, default=62,
                   dest="samples_per_object")
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--noise", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gradcheck",
                       help="finite-difference check of the layer backwards")
    p.add_argument("--arch", default="tiny",
                   choices=["tiny", "cnn0", "cnn1", "cnn2", "cnn3"],
                   help="width-reduced architecture variant to check")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("render", help="render a saved image (.npy) as PGM")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output .pgm path")
    p.add_argument("--png", help="also write a matplotlib heatmap PNG")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TaxelGridError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
