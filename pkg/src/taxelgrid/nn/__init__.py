"""From-scratch differentiable-layer engine for the grasp classifiers."""

from .gradcheck import GradCheckReport, gradient_check
from .model import (
    LayerSpec,
    ModelSpec,
    Network,
    TrainedModel,
    conv2d,
    dense,
    dropout,
    flatten,
    forward,
    maxpool,
    predict,
    predict_indices,
    preset,
    relu,
    softmax_output,
)
from .serialize import load_model, save_model
from .train import TrainConfig, loss_and_gradients, train

__all__ = [
    "GradCheckReport",
    "gradient_check",
    "LayerSpec",
    "ModelSpec",
    "Network",
    "TrainedModel",
    "conv2d",
    "dense",
    "dropout",
    "flatten",
    "forward",
    "maxpool",
    "predict",
    "predict_indices",
    "preset",
    "relu",
    "softmax_output",
    "load_model",
    "save_model",
    "TrainConfig",
    "loss_and_gradients",
    "train",
]
