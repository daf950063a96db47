"""taxelgrid: tactile images from non-matrix touch sensors, plus the
classifiers that predict grasp stability from them."""

from . import baselines, nn
from .dataset import SynthConfig, generate_synthetic, load_dataset, save_dataset
from .errors import TaxelGridError
from .experiment import ExperimentConfig, ProtocolConfig, run_experiment
from .imaging import (
    SparseTactileImage,
    TactileImage,
    build_sparse_image,
    compose,
    decompose,
    fill_min_electrode,
    fill_neighbor_mean,
    flip,
    rotate,
    zscore_normalize,
)
from .layouts import SensorLayout, get_layout, load_layout, save_layout
from .metrics import ConfusionCounts, aggregate, confusion_counts, metrics
from .pipeline import PipelineConfig, augment_dataset, preprocess
from .samples import GraspSample, PreprocessedSample
from .splits import kfold_split, object_holdout_split, stratified_kfold_split

__version__ = "0.1.0"

__all__ = [
    "baselines",
    "nn",
    "SynthConfig",
    "generate_synthetic",
    "load_dataset",
    "save_dataset",
    "TaxelGridError",
    "ExperimentConfig",
    "ProtocolConfig",
    "run_experiment",
    "SparseTactileImage",
    "TactileImage",
    "build_sparse_image",
    "compose",
    "decompose",
    "fill_min_electrode",
    "fill_neighbor_mean",
    "flip",
    "rotate",
    "zscore_normalize",
    "SensorLayout",
    "get_layout",
    "load_layout",
    "save_layout",
    "ConfusionCounts",
    "aggregate",
    "confusion_counts",
    "metrics",
    "PipelineConfig",
    "augment_dataset",
    "preprocess",
    "GraspSample",
    "PreprocessedSample",
    "kfold_split",
    "object_holdout_split",
    "stratified_kfold_split",
    "__version__",
]
