"""Model descriptions, the four CNN presets, and inference entry points."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigInvalid, ShapeMismatch
from . import layers as L

LAYER_KINDS = (
    "conv2d",
    "maxpool",
    "relu",
    "flatten",
    "dense",
    "dropout",
    "softmax_output",
)

PRESET_NAMES = ("cnn0", "cnn1", "cnn2", "cnn3")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    filters: int = 0
    kernel: int = 0
    units: int = 0
    rate: float = 0.0
    classes: int = 2

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ConfigInvalid(f"unknown layer kind {self.kind!r}")
        if self.kind == "conv2d" and (self.filters < 1 or self.kernel < 1):
            raise ConfigInvalid("conv2d needs positive filters and kernel")
        if self.kind == "maxpool" and self.kernel < 1:
            raise ConfigInvalid("maxpool needs a positive kernel")
        if self.kind == "dense" and self.units < 1:
            raise ConfigInvalid("dense needs positive units")
        if self.kind == "dropout" and not 0.0 <= self.rate < 1.0:
            raise ConfigInvalid("dropout rate must be in [0, 1)")
        if self.kind == "softmax_output" and self.classes != 2:
            raise ConfigInvalid("softmax output is fixed at 2 classes")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "conv2d":
            d.update(filters=self.filters, kernel=self.kernel)
        elif self.kind == "maxpool":
            d.update(kernel=self.kernel)
        elif self.kind == "dense":
            d.update(units=self.units)
        elif self.kind == "dropout":
            d.update(rate=self.rate)
        elif self.kind == "softmax_output":
            d.update(classes=self.classes)
        return d

    @staticmethod
    def from_dict(d: dict) -> "LayerSpec":
        return LayerSpec(**d)


def conv2d(filters, kernel):
    return LayerSpec(kind="conv2d", filters=filters, kernel=kernel)


def maxpool(kernel):
    return LayerSpec(kind="maxpool", kernel=kernel)


def relu():
    return LayerSpec(kind="relu")


def flatten():
    return LayerSpec(kind="flatten")


def dense(units):
    return LayerSpec(kind="dense", units=units)


def dropout(rate):
    return LayerSpec(kind="dropout", rate=rate)


def softmax_output():
    return LayerSpec(kind="softmax_output")


@dataclass(frozen=True)
class ModelSpec:
    """Layer-by-layer network description plus init seed and L2 strength."""

    name: str
    input_shape: tuple
    layers: tuple
    l2_lambda: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "input_shape", tuple(self.input_shape))
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.l2_lambda < 0:
            raise ConfigInvalid("l2_lambda must be nonnegative")
        kinds = [l.kind for l in self.layers]
        if kinds.count("softmax_output") != 1 or kinds[-1] != "softmax_output":
            raise ConfigInvalid(
                "models must end with exactly one softmax output layer"
            )
        if "flatten" in kinds:
            after = kinds[kinds.index("flatten") :]
            if "conv2d" in after or "maxpool" in after:
                raise ConfigInvalid("conv/pool layers must come before flatten")
        # Raises ShapeMismatch if the chain does not fit the input.
        self.shape_chain()

    def shape_chain(self):
        """Output shape after each layer, starting from input_shape."""
        shape = self.input_shape
        chain = []
        for spec in self.layers:
            if spec.kind == "conv2d":
                if len(shape) != 3:
                    raise ShapeMismatch(f"conv2d on non-image shape {shape}")
                h, w, c = shape
                if h < spec.kernel or w < spec.kernel:
                    raise ShapeMismatch(
                        f"conv2d kernel {spec.kernel} exceeds input {shape}"
                    )
                shape = (h - spec.kernel + 1, w - spec.kernel + 1, spec.filters)
            elif spec.kind == "maxpool":
                if len(shape) != 3:
                    raise ShapeMismatch(f"maxpool on non-image shape {shape}")
                h, w, c = shape
                if h < spec.kernel or w < spec.kernel:
                    raise ShapeMismatch(
                        f"maxpool kernel {spec.kernel} exceeds input {shape}"
                    )
                shape = (h // spec.kernel, w // spec.kernel, c)
            elif spec.kind == "flatten":
                shape = (int(np.prod(shape)),)
            elif spec.kind == "dense":
                if len(shape) != 1:
                    raise ShapeMismatch(f"dense on non-flat shape {shape}")
                shape = (spec.units,)
            elif spec.kind == "softmax_output":
                if len(shape) != 1:
                    raise ShapeMismatch(f"softmax output on non-flat {shape}")
                shape = (spec.classes,)
            chain.append(shape)
        return chain

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "input_shape": list(self.input_shape),
            "layers": [l.to_dict() for l in self.layers],
            "l2_lambda": self.l2_lambda,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "ModelSpec":
        return ModelSpec(
            name=d["name"],
            input_shape=tuple(d["input_shape"]),
            layers=tuple(LayerSpec.from_dict(ld) for ld in d["layers"]),
            l2_lambda=d["l2_lambda"],
            seed=d["seed"],
        )


def preset(name: str, input_shape, l2_lambda: float = 0.0,
           dropout_rate: float = 0.0, seed: int = 0) -> ModelSpec:
    """The four benchmark architectures on a given input shape.

    When dropout_rate > 0 a dropout layer is inserted before the output
    layer, the conventional spot for regularizing the wide FC layer.
    """
    name = name.lower()
    if name == "cnn0":
        body = [conv2d(32, 3), relu(), flatten(), dense(128), relu()]
    elif name == "cnn1":
        body = [conv2d(32, 3), relu(), flatten(), dense(1024), relu()]
    elif name == "cnn2":
        body = [conv2d(32, 3), relu(), maxpool(2), flatten(),
                dense(1024), relu()]
    elif name == "cnn3":
        body = [conv2d(32, 3), relu(), maxpool(2), conv2d(64, 3), relu(),
                flatten(), dense(1024), relu()]
    else:
        raise ConfigInvalid(f"unknown preset {name!r}; use {PRESET_NAMES}")
    if dropout_rate > 0.0:
        body.append(dropout(dropout_rate))
    body.append(softmax_output())
    return ModelSpec(name=name, input_shape=tuple(input_shape),
                     layers=tuple(body), l2_lambda=l2_lambda, seed=seed)


class Network:
    """Mutable layer stack used during one training or inference run."""

    def __init__(self, spec: ModelSpec, params=None):
        self.spec = spec
        rng = np.random.default_rng(spec.seed)
        self.layers = []
        shape = spec.input_shape
        for lspec in spec.layers:
            if lspec.kind == "conv2d":
                layer = L.Conv2D(lspec.kernel, lspec.filters, shape, rng)
            elif lspec.kind == "maxpool":
                layer = L.MaxPool2D(lspec.kernel, shape)
            elif lspec.kind == "relu":
                layer = L.ReLU()
            elif lspec.kind == "flatten":
                layer = L.Flatten(shape)
            elif lspec.kind == "dense":
                layer = L.Dense(lspec.units, shape, rng)
            elif lspec.kind == "dropout":
                layer = L.Dropout(lspec.rate)
            else:
                layer = L.SoftmaxOutput(lspec.classes, shape, rng)
            shape = layer.out_shape(shape)
            self.layers.append(layer)
        if params is not None:
            self.set_params(params)

    @property
    def output_layer(self) -> L.SoftmaxOutput:
        return self.layers[-1]

    def get_params(self):
        """Copies of every parameter array, one dict per layer."""
        return [
            {k: v.copy() for k, v in layer.params.items()}
            for layer in self.layers
        ]

    def set_params(self, params):
        if len(params) != len(self.layers):
            raise ShapeMismatch("parameter list does not match layer count")
        for layer, pdict in zip(self.layers, params):
            if set(pdict) != set(layer.params):
                raise ShapeMismatch("parameter names do not match layer")
            for k, v in pdict.items():
                if v.shape != layer.params[k].shape:
                    raise ShapeMismatch(
                        f"parameter {k} has shape {v.shape}, "
                        f"expected {layer.params[k].shape}"
                    )
                layer.params[k] = np.array(v, dtype=np.float64)

    def forward(self, x, train=False, rng=None):
        """Class probabilities for a batch; dropout only fires in train mode."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[1:] != self.spec.input_shape:
            raise ShapeMismatch(
                f"input shape {x.shape[1:]} does not match "
                f"spec {self.spec.input_shape}"
            )
        for layer in self.layers:
            x = layer.forward(x, train=train, rng=rng)
        return x

    def weight_squares(self) -> float:
        """Sum of squared weights (biases excluded) for the L2 term."""
        total = 0.0
        for layer in self.layers:
            if "W" in layer.params:
                w = layer.params["W"]
                total += float(np.vdot(w, w))
        return total

    def backward_from_labels(self, labels):
        """Backpropagate mean cross-entropy; adds the L2 term to W grads."""
        grad = self.output_layer.backward_from_labels(labels)
        for layer in reversed(self.layers[:-1]):
            grad = layer.backward(grad)
        lam = self.spec.l2_lambda
        if lam > 0.0:
            for layer in self.layers:
                if "W" in layer.params:
                    layer.grads["W"] = layer.grads["W"] + 2.0 * lam * layer.params["W"]
        return grad

    def get_grads(self):
        return [
            {k: v for k, v in layer.grads.items()} for layer in self.layers
        ]

    def param_count(self) -> int:
        return sum(
            v.size for layer in self.layers for v in layer.params.values()
        )


@dataclass(frozen=True)
class TrainedModel:
    """Immutable network description plus learned parameters."""

    spec: ModelSpec
    parameters: tuple  # one dict of read-only arrays per layer
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        frozen = []
        for pdict in self.parameters:
            fd = {}
            for k, v in pdict.items():
                arr = np.array(v, dtype=np.float64)
                arr.setflags(write=False)
                fd[k] = arr
            frozen.append(fd)
        object.__setattr__(self, "parameters", tuple(frozen))
        # Validates parameter shapes against the spec.
        self.network()

    def network(self) -> Network:
        return Network(self.spec, params=list(self.parameters))


def _image_array(image) -> np.ndarray:
    if isinstance(image, np.ndarray):
        return image
    if hasattr(image, "data") and isinstance(image.data, np.ndarray):
        return image.data
    return np.asarray(image)


def forward(model: TrainedModel, image, mode: str = "infer",
            dropout_rng=None) -> np.ndarray:
    """Class probabilities (stable, slippery) for a single input."""
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be train or infer, got {mode!r}")
    data = _image_array(image)
    net = model.network()
    train = mode == "train"
    if train and dropout_rng is None:
        dropout_rng = np.random.default_rng([model.spec.seed, 0])
    probs = net.forward(data[None, ...], train=train, rng=dropout_rng)
    return probs[0]


def predict_indices(model: TrainedModel, batch: np.ndarray) -> np.ndarray:
    """Class index per row; an exact tie counts as slippery."""
    net = model.network()
    probs = net.forward(batch, train=False)
    return np.where(probs[:, 0] > probs[:, 1], 0, 1)


def predict(model: TrainedModel, image) -> str:
    """stable/slippery decision for one input (ties resolve to slippery)."""
    from ..samples import LABELS

    idx = predict_indices(model, _image_array(image)[None, ...])[0]
    return LABELS[idx]
