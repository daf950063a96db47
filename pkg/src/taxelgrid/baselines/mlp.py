"""MLP baseline: a flat-input network trained by the same engine."""

from __future__ import annotations

from ..nn.model import ModelSpec, dense, relu, softmax_output

FLAT_FEATURES = 72  # 24 electrodes x 3 fingers


def mlp_preset(l2_lambda: float = 0.0, seed: int = 0) -> ModelSpec:
    """72 -> 128 relu -> softmax, consuming z-scored electrode vectors."""
    return ModelSpec(
        name="mlp",
        input_shape=(FLAT_FEATURES,),
        layers=(dense(128), relu(), softmax_output()),
        l2_lambda=l2_lambda,
        seed=seed,
    )
