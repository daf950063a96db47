"""Differentiable layers: forward caches what backward needs.

Arrays are float64, batch-first, channel-last. Convolutions are valid
padding, stride 1; pooling is non-overlapping and floor-truncates odd
remainders. Layer instances are private to one training/inference run;
the shareable artifact is the parameter set.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


def _uniform_fan_in(rng, fan_in: int, shape) -> np.ndarray:
    # scaled uniform by fan-in
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Layer:
    """Base: parameter-free identity-ish layer."""

    def __init__(self):
        self.params = {}
        self.grads = {}

    def forward(self, x, train=False, rng=None):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def out_shape(self, in_shape):
        return in_shape


class Conv2D(Layer):
    """Valid-padding stride-1 convolution: (H, W, C) -> (H-K+1, W-K+1, F)."""

    def __init__(self, kernel: int, filters: int, in_shape, rng):
        super().__init__()
        if len(in_shape) != 3:
            raise ShapeMismatch(f"conv2d needs a 3-d input, got {in_shape}")
        h, w, c = in_shape
        if h < kernel or w < kernel:
            raise ShapeMismatch(
                f"conv2d kernel {kernel} does not fit input {h}x{w}"
            )
        self.kernel = kernel
        self.filters = filters
        self.in_channels = c
        fan_in = kernel * kernel * c
        self.params = {
            "W": _uniform_fan_in(rng, fan_in, (kernel, kernel, c, filters)),
            "b": np.zeros(filters),
        }
        self.grads = {}
        self._cols = None
        self._x_shape = None

    def out_shape(self, in_shape):
        h, w, _ = in_shape
        return (h - self.kernel + 1, w - self.kernel + 1, self.filters)

    def _im2col(self, x):
        n, h, w, c = x.shape
        k = self.kernel
        oh, ow = h - k + 1, w - k + 1
        cols = np.empty((n, oh, ow, k, k, c), dtype=np.float64)
        for kr in range(k):
            for kc in range(k):
                cols[:, :, :, kr, kc, :] = x[:, kr : kr + oh, kc : kc + ow, :]
        return cols.reshape(n * oh * ow, k * k * c), oh, ow

    def forward(self, x, train=False, rng=None):
        n = x.shape[0]
        cols, oh, ow = self._im2col(x)
        w_mat = self.params["W"].reshape(-1, self.filters)
        out = cols @ w_mat + self.params["b"]
        self._cols = cols
        self._x_shape = x.shape
        return out.reshape(n, oh, ow, self.filters)

    def backward(self, dout):
        n, oh, ow, f = dout.shape
        k, c = self.kernel, self.in_channels
        dflat = dout.reshape(n * oh * ow, f)
        self.grads["W"] = (self._cols.T @ dflat).reshape(self.params["W"].shape)
        self.grads["b"] = dflat.sum(axis=0)
        dcols = (dflat @ self.params["W"].reshape(-1, f).T).reshape(
            n, oh, ow, k, k, c
        )
        dx = np.zeros(self._x_shape, dtype=np.float64)
        for kr in range(k):
            for kc in range(k):
                dx[:, kr : kr + oh, kc : kc + ow, :] += dcols[:, :, :, kr, kc, :]
        return dx


class MaxPool2D(Layer):
    """KxK non-overlapping max pooling; trailing remainder cells dropped."""

    def __init__(self, kernel: int, in_shape):
        super().__init__()
        if len(in_shape) != 3:
            raise ShapeMismatch(f"maxpool needs a 3-d input, got {in_shape}")
        h, w, _ = in_shape
        if h < kernel or w < kernel:
            raise ShapeMismatch(
                f"maxpool kernel {kernel} does not fit input {h}x{w}"
            )
        self.kernel = kernel
        self._argmax = None
        self._x_shape = None

    def out_shape(self, in_shape):
        h, w, c = in_shape
        return (h // self.kernel, w // self.kernel, c)

    def forward(self, x, train=False, rng=None):
        n, h, w, c = x.shape
        k = self.kernel
        oh, ow = h // k, w // k
        trimmed = x[:, : oh * k, : ow * k, :]
        windows = trimmed.reshape(n, oh, k, ow, k, c)
        windows = windows.transpose(0, 1, 3, 5, 2, 4).reshape(n, oh, ow, c, k * k)
        self._argmax = windows.argmax(axis=4)
        self._x_shape = x.shape
        return windows.max(axis=4)

    def backward(self, dout):
        n, oh, ow, c = dout.shape
        k = self.kernel
        dwin = np.zeros((n, oh, ow, c, k * k), dtype=np.float64)
        np.put_along_axis(dwin, self._argmax[..., None], dout[..., None], axis=4)
        dwin = dwin.reshape(n, oh, ow, c, k, k).transpose(0, 1, 4, 2, 5, 3)
        dx = np.zeros(self._x_shape, dtype=np.float64)
        dx[:, : oh * k, : ow * k, :] = dwin.reshape(n, oh * k, ow * k, c)
        return dx


class ReLU(Layer):
    def __init__(self):
        super().__init__()
        self._mask = None

    def forward(self, x, train=False, rng=None):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dout):
        return np.where(self._mask, dout, 0.0)


class Flatten(Layer):
    def __init__(self, in_shape):
        super().__init__()
        self._in_shape = tuple(in_shape)

    def out_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def forward(self, x, train=False, rng=None):
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        return dout.reshape(dout.shape[0], *self._in_shape)


class Dense(Layer):
    def __init__(self, units: int, in_shape, rng):
        super().__init__()
        if len(in_shape) != 1:
            raise ShapeMismatch(
                f"dense needs a flat input, got {in_shape}; add flatten"
            )
        d = in_shape[0]
        self.units = units
        self.params = {
            "W": _uniform_fan_in(rng, d, (d, units)),
            "b": np.zeros(units),
        }
        self.grads = {}
        self._x = None

    def out_shape(self, in_shape):
        return (self.units,)

    def forward(self, x, train=False, rng=None):
        self._x = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, dout):
        self.grads["W"] = self._x.T @ dout
        self.grads["b"] = dout.sum(axis=0)
        return dout @ self.params["W"].T


class Dropout(Layer):
    """Inverted dropout: infer mode is the identity, train mode zeroes a
    fraction ``rate`` of activations and rescales survivors by 1/(1-rate)."""

    def __init__(self, rate: float):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self._scaled_mask = None

    def forward(self, x, train=False, rng=None):
        if not train or self.rate == 0.0:
            self._scaled_mask = None
            return x
        if rng is None:
            raise ValueError("train-mode dropout needs a random generator")
        keep = rng.random(x.shape) >= self.rate
        self._scaled_mask = keep / (1.0 - self.rate)
        return x * self._scaled_mask

    def backward(self, dout):
        if self._scaled_mask is None:
            return dout
        return dout * self._scaled_mask


class SoftmaxOutput(Layer):
    """Fully connected projection to class logits plus softmax."""

    def __init__(self, classes: int, in_shape, rng):
        super().__init__()
        if len(in_shape) != 1:
            raise ShapeMismatch(
                f"softmax output needs a flat input, got {in_shape}"
            )
        d = in_shape[0]
        self.classes = classes
        self.params = {
            "W": _uniform_fan_in(rng, d, (d, classes)),
            "b": np.zeros(classes),
        }
        self.grads = {}
        self._x = None
        self._probs = None

    def out_shape(self, in_shape):
        return (self.classes,)

    def forward(self, x, train=False, rng=None):
        self._x = x
        logits = x @ self.params["W"] + self.params["b"]
        shifted = logits - logits.max(axis=1, keepdims=True)
        expv = np.exp(shifted)
        self._probs = expv / expv.sum(axis=1, keepdims=True)
        return self._probs

    def cross_entropy(self, labels) -> float:
        """Mean cross-entropy of the cached forward pass."""
        n = self._probs.shape[0]
        p = self._probs[np.arange(n), labels]
        return float(-np.log(np.maximum(p, 1e-300)).mean())

    def backward_from_labels(self, labels):
        """Gradient of mean cross-entropy w.r.t. this layer's input."""
        n = self._probs.shape[0]
        dlogits = self._probs.copy()
        dlogits[np.arange(n), labels] -= 1.0
        dlogits /= n
        self.grads["W"] = self._x.T @ dlogits
        self.grads["b"] = dlogits.sum(axis=0)
        return dlogits @ self.params["W"].T

    def backward(self, dout):
        raise NotImplementedError(
            "softmax output backpropagates from labels, not upstream grads"
        )
