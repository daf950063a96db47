import numpy as np
import pytest

from taxelgrid.samples import GraspSample


@pytest.fixture(autouse=True)
def _no_thread_env(monkeypatch):
    # keep parallel-map single threaded unless a test opts in
    monkeypatch.delenv("TAXELGRID_THREADS", raising=False)


def make_reading(rng, scale=1.0):
    return rng.normal(0.0, scale, 24)


def make_grasp(rng, label="stable", object_id="obj00", sample_id="s0",
               orientation="palm_down"):
    return GraspSample(
        fingers=(make_reading(rng), make_reading(rng), make_reading(rng)),
        label=label,
        object_id=object_id,
        orientation=orientation,
        sample_id=sample_id,
    )


def fixed_patch_samples(n_objects=6, per_object=8, offset=40.0, seed=0):
    """Trivially separable grasps: stable raises a FIXED electrode patch.

    Unlike the synthetic generator's random patches, the fixed position
    makes the task easy for every model family (used for perfect-score
    and smoke experiments).
    """
    rng = np.random.default_rng(seed)
    out = []
    sid = 0
    for obj in range(n_objects):
        base = rng.normal(0.0, 1.0, 72)
        for j in range(per_object):
            label = "stable" if j % 2 == 0 else "slippery"
            x = base + rng.normal(0.0, 0.1, 72)
            sign = 1.0 if label == "stable" else -1.0
            for f in range(3):
                x[24 * f : 24 * f + 6] += sign * offset
            out.append(
                GraspSample(
                    fingers=(x[0:24], x[24:48], x[48:72]),
                    label=label,
                    object_id=f"obj{obj:02d}",
                    orientation="palm_down" if j % 2 else "palm_side",
                    sample_id=f"s{sid:04d}",
                )
            )
            sid += 1
    return out


def train_perceptron(X, y, epochs=200):
    """Independent linear-separability oracle: plain perceptron updates."""
    X = np.asarray(X, dtype=np.float64).reshape(len(X), -1)
    s = np.where(np.asarray(y) == 0, 1.0, -1.0)
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(epochs):
        mistakes = 0
        for i in range(len(X)):
            if s[i] * (X[i] @ w + b) <= 0.0:
                w += s[i] * X[i]
                b += s[i]
                mistakes += 1
        if mistakes == 0:
            break
    pred = np.where(X @ w + b > 0, 0, 1)
    return float((pred == np.asarray(y)).mean())
