"""Classical baselines trained on flat 72-value grasp vectors."""

from .forest import (
    ForestConfig,
    RandomForestModel,
    rf_predict,
    rf_train,
    tree_predict,
)
from .mlp import mlp_preset
from .svm import LinearModel, SvmConfig, hinge_objective, svm_predict, svm_train

__all__ = [
    "ForestConfig",
    "RandomForestModel",
    "rf_predict",
    "rf_train",
    "tree_predict",
    "mlp_preset",
    "LinearModel",
    "SvmConfig",
    "hinge_objective",
    "svm_predict",
    "svm_train",
]
