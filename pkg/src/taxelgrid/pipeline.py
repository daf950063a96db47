"""Per-sample preprocessing chains and training-set augmentation.

Per finger: z-score the 24 raw values, place them on the layout grid, fill
the gaps; then compose the three finger images into one input. Flat models
skip the grid and use the z-scored 72-vector directly.
"""

from __future__ import annotations

import concurrent.futures
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigInvalid
from .imaging import (
    COMPOSE_MODES,
    TactileImage,
    build_sparse_image,
    compose,
    fill_min_electrode,
    fill_neighbor_mean,
    flip,
    rotate,
    zscore_normalize,
)
from .layouts import SensorLayout, get_layout
from .samples import GraspSample, PreprocessedSample

FILL_STRATEGIES = ("min", "mean")

THREADS_ENV = "TAXELGRID_THREADS"


@dataclass(frozen=True)
class PipelineConfig:
    """Names the layout, gap fill strategy and composition mode."""

    layout: str = "d1"
    fill: str = "mean"
    compose: str = "channels"

    def __post_init__(self):
        if self.fill not in FILL_STRATEGIES:
            raise ConfigInvalid(
                f"fill must be one of {FILL_STRATEGIES}, got {self.fill!r}"
            )
        if self.compose not in COMPOSE_MODES:
            raise ConfigInvalid(
                f"compose must be one of {COMPOSE_MODES}, got {self.compose!r}"
            )

    def resolve_layout(self) -> SensorLayout:
        from .layouts import resolve_layout

        return resolve_layout(self.layout)


def finger_image(reading, layout: SensorLayout, fill: str) -> TactileImage:
    """z-score -> sparse grid -> gap fill, for one finger."""
    sparse = build_sparse_image(zscore_normalize(reading), layout)
    if fill == "min":
        return fill_min_electrode(sparse)
    return fill_neighbor_mean(sparse)


def preprocess(sample: GraspSample, config: PipelineConfig):
    """Turn a grasp sample into a composed tactile image plus its label."""
    layout = config.resolve_layout()
    images = [finger_image(f, layout, config.fill) for f in sample.fingers]
    return compose(images, config.compose), sample.label


def preprocess_sample(sample: GraspSample, config: PipelineConfig,
                      layout: SensorLayout = None) -> PreprocessedSample:
    if layout is None:
        layout = config.resolve_layout()
    images = [finger_image(f, layout, config.fill) for f in sample.fingers]
    img = compose(images, config.compose)
    return PreprocessedSample(
        x=img.data,
        label=sample.label,
        object_id=sample.object_id,
        sample_id=sample.sample_id,
    )


def flatten_sample(sample: GraspSample) -> PreprocessedSample:
    """72-value vector: each finger z-scored separately, then concatenated."""
    feats = np.concatenate([zscore_normalize(f) for f in sample.fingers])
    return PreprocessedSample(
        x=feats,
        label=sample.label,
        object_id=sample.object_id,
        sample_id=sample.sample_id,
    )


def worker_count() -> int:
    """Worker cap from TAXELGRID_THREADS; defaults to single-threaded."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigInvalid(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, n)


def parallel_map(fn, items):
    """Map preserving input order; thread count capped by TAXELGRID_THREADS."""
    workers = worker_count()
    items = list(items)
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def preprocess_dataset(samples, config: PipelineConfig):
    """Preprocess every sample, deterministically ordered like the input."""
    layout = config.resolve_layout()
    return parallel_map(
        lambda s: preprocess_sample(s, config, layout=layout), samples
    )


def flatten_dataset(samples):
    return parallel_map(flatten_sample, samples)


def augment_dataset(samples, seed: int):
    """Originals + vertical flips + horizontal flips + one rotation each.

    Rotation angles are drawn uniformly from [-10, 10] degrees with the
    seeded generator, one per source sample. Output size is exactly 4x the
    input; labels and object ids carry over to every derived sample.
    """
    samples = list(samples)
    rng = np.random.default_rng(seed)
    angles = rng.uniform(-10.0, 10.0, size=len(samples))
    out = list(samples)
    for s in samples:
        img = TactileImage(data=np.asarray(s.x, dtype=np.float64).copy())
        out.append(s.derived(flip(img, "vertical").data, "flip_vertical"))
    for s in samples:
        img = TactileImage(data=np.asarray(s.x, dtype=np.float64).copy())
        out.append(s.derived(flip(img, "horizontal").data, "flip_horizontal"))
    for s, angle in zip(samples, angles):
        img = TactileImage(data=np.asarray(s.x, dtype=np.float64).copy())
        out.append(s.derived(rotate(img, float(angle)).data, "rotated"))
    return out
