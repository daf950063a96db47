"""Canonical CSV dataset format and a synthetic grasp generator.

One row per grasp: sample_id, object_id, orientation, label, then the 72
electrode values finger-major (index e0..e23, middle e0..e23, thumb
e0..e23). UTF-8, comma-separated, ``.`` decimal point, mandatory header.
Floats are written with shortest round-trip formatting, so reading a saved
dataset reproduces every value exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import BadColumnCount, BadLabel, ParseError
from .samples import FINGERS, LABELS, ORIENTATIONS, SLIPPERY, STABLE, GraspSample

N_COLUMNS = 76

HEADER = ["sample_id", "object_id", "orientation", "label"] + [
    f"{finger}_e{i}" for finger in FINGERS for i in range(24)
]


def load_dataset(path):
    """Read grasp samples from a CSV file, preserving row order."""
    samples = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, header required", line=1)
        if header != HEADER:
            raise ParseError(
                f"{path}: bad header; expected {len(HEADER)} known columns",
                line=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != N_COLUMNS:
                raise BadColumnCount(
                    f"{path}: expected {N_COLUMNS} columns, got {len(row)}",
                    line=lineno,
                )
            sample_id, object_id, orientation, label = row[:4]
            label = label.strip().lower()
            if label not in LABELS:
                raise BadLabel(
                    f"{path}: label must be stable or slippery, got {row[3]!r}",
                    line=lineno,
                )
            orientation = orientation.strip().lower()
            if orientation not in ORIENTATIONS:
                raise ParseError(
                    f"{path}: orientation must be one of {ORIENTATIONS}, "
                    f"got {row[2]!r}",
                    line=lineno,
                )
            try:
                values = np.array([float(v) for v in row[4:]], dtype=np.float64)
            except ValueError:
                raise ParseError(f"{path}: non-numeric electrode value",
                                 line=lineno)
            if not np.all(np.isfinite(values)):
                raise ParseError(f"{path}: non-finite electrode value",
                                 line=lineno)
            samples.append(
                GraspSample(
                    fingers=(values[0:24], values[24:48], values[48:72]),
                    label=label,
                    object_id=object_id,
                    orientation=orientation,
                    sample_id=sample_id,
                )
            )
    return samples


def save_dataset(samples, path) -> None:
    """Write samples to CSV; load_dataset(save_dataset(x)) returns x."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for s in samples:
            row = [s.sample_id, s.object_id, s.orientation, s.label]
            row.extend(repr(float(v)) for v in s.flat_values())
            writer.writerow(row)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the synthetic generator used by the learnability tests."""

    n_objects: int = 41
    samples_per_object: int = 62
    class_separation: float = 3.0
    noise_std: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.n_objects < 1 or self.samples_per_object < 1:
            raise ValueError("object and sample counts must be positive")
        if self.class_separation < 0:
            raise ValueError("class_separation must be >= 0")
        if self.noise_std <= 0:
            raise ValueError("noise_std must be > 0")


def generate_synthetic(cfg: SynthConfig):
    """Grasp samples with a controllable stable/slippery contrast.

    Each object gets a random 72-value base signature. Stable samples raise
    a random 8-electrode contact patch on every finger by class_separation;
    slippery samples lower it. Gaussian noise is added on top. Labels are
    balanced per object within one sample. Deterministic under the seed.
    """
    rng = np.random.default_rng(cfg.seed)
    samples = []
    counter = 0
    for obj in range(cfg.n_objects):
        object_id = f"obj{obj:02d}"
        base = rng.normal(0.0, 1.0, size=72)
        m = cfg.samples_per_object
        labels = [STABLE] * ((m + 1) // 2) + [SLIPPERY] * (m // 2)
        order = rng.permutation(m)
        for j in range(m):
            label = labels[order[j]]
            x = base + rng.normal(0.0, cfg.noise_std, size=72)
            sign = 1.0 if label == STABLE else -1.0
            for f in range(3):
                start = int(rng.integers(0, 24))
                patch = (start + np.arange(8)) % 24 + 24 * f
                x[patch] += sign * cfg.class_separation
            orientation = ORIENTATIONS[int(rng.integers(0, 2))]
            samples.append(
                GraspSample(
                    fingers=(x[0:24], x[24:48], x[48:72]),
                    label=label,
                    object_id=object_id,
                    orientation=orientation,
                    sample_id=f"s{counter:05d}",
                )
            )
            counter += 1
    return samples
