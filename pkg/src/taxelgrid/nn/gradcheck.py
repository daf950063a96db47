"""Central finite-difference verification of the backward passes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigInvalid
from .model import (
    ModelSpec,
    Network,
    conv2d,
    dense,
    dropout,
    flatten,
    maxpool,
    relu,
    softmax_output,
)

MAX_CHECK_PARAMS = 10_000


def small_spec(arch: str = "tiny", seed: int = 0) -> ModelSpec:
    """Width-reduced architecture variants that fit under the check budget.

    "tiny" exercises every layer kind at once; the cnn* variants keep the
    benchmark layer order with 4/8 filters and narrow dense layers.
    """
    arch = arch.lower()
    if arch == "tiny":
        shape, body = (6, 5, 1), [
            conv2d(4, 3), relu(), maxpool(2), flatten(),
            dense(8), relu(), dropout(0.3),
        ]
    elif arch == "cnn0":
        shape, body = (6, 5, 1), [
            conv2d(4, 3), relu(), flatten(), dense(16), relu(),
        ]
    elif arch == "cnn1":
        shape, body = (6, 5, 1), [
            conv2d(4, 3), relu(), flatten(), dense(32), relu(),
        ]
    elif arch == "cnn2":
        shape, body = (6, 5, 1), [
            conv2d(4, 3), relu(), maxpool(2), flatten(), dense(32), relu(),
        ]
    elif arch == "cnn3":
        shape, body = (9, 8, 1), [
            conv2d(4, 3), relu(), maxpool(2), conv2d(8, 3), relu(),
            flatten(), dense(16), relu(),
        ]
    else:
        raise ConfigInvalid(f"unknown gradcheck arch {arch!r}")
    body.append(softmax_output())
    return ModelSpec(name=f"{arch}-small", input_shape=shape,
                     layers=tuple(body), seed=seed)


@dataclass(frozen=True)
class LayerCheck:
    layer: int
    kind: str
    param: str
    max_rel_error: float


@dataclass(frozen=True)
class GradCheckReport:
    tolerance: float
    epsilon: float
    checks: tuple
    param_count: int

    @property
    def passed(self) -> bool:
        return all(c.max_rel_error <= self.tolerance for c in self.checks)

    @property
    def max_rel_error(self) -> float:
        return max((c.max_rel_error for c in self.checks), default=0.0)

    def lines(self):
        out = []
        for c in self.checks:
            status = "ok" if c.max_rel_error <= self.tolerance else "FAIL"
            out.append(
                f"layer {c.layer:2d} {c.kind:<15s} {c.param}: "
                f"max rel err {c.max_rel_error:.3e} [{status}]"
            )
        verdict = "PASS" if self.passed else "FAIL"
        out.append(
            f"{verdict}: {self.param_count} parameters checked at "
            f"tolerance {self.tolerance:g}"
        )
        return out


def gradient_check(spec: ModelSpec, tolerance: float = 1e-4,
                   n_samples: int = 4, epsilon: float = 1e-5,
                   data_seed: int = 7, mask_seed: int = 99) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    Dropout masks are regenerated from mask_seed for every loss evaluation,
    so the perturbed and unperturbed losses see identical masks and the
    check exercises the dropout backward exactly.
    """
    net = Network(spec)
    n_params = net.param_count()
    if n_params > MAX_CHECK_PARAMS:
        raise ConfigInvalid(
            f"spec has {n_params} parameters; finite differences are only "
            f"practical up to {MAX_CHECK_PARAMS}"
        )
    rng = np.random.default_rng(data_seed)
    X = rng.normal(0.0, 1.0, size=(n_samples, *spec.input_shape))
    y = np.arange(n_samples, dtype=np.intp) % 2

    def eval_loss() -> float:
        net.forward(X, train=True, rng=np.random.default_rng(mask_seed))
        loss = net.output_layer.cross_entropy(y)
        return loss + spec.l2_lambda * net.weight_squares()

    eval_loss()
    net.backward_from_labels(y)
    analytic = net.get_grads()

    checks = []
    for li, layer in enumerate(net.layers):
        for key in sorted(layer.params):
            param = layer.params[key]
            grad = analytic[li][key]
            worst = 0.0
            it = np.nditer(param, flags=["multi_index"])
            while not it.finished:
                idx = it.multi_index
                orig = param[idx]
                param[idx] = orig + epsilon
                lp = eval_loss()
                param[idx] = orig - epsilon
                lm = eval_loss()
                param[idx] = orig
                fd = (lp - lm) / (2.0 * epsilon)
                an = grad[idx]
                rel = abs(fd - an) / max(abs(fd) + abs(an), 1e-6)
                worst = max(worst, rel)
                it.iternext()
            checks.append(
                LayerCheck(layer=li, kind=spec.layers[li].kind, param=key,
                           max_rel_error=worst)
            )
    return GradCheckReport(
        tolerance=tolerance,
        epsilon=epsilon,
        checks=tuple(checks),
        param_count=n_params,
    )
