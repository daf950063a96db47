"""Visual output: PGM dumps for inspection, matplotlib figures for reports."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import ShapeMismatch  # noqa: E402
from .metrics import METRIC_NAMES  # noqa: E402

PGM_MAXVAL = 255
PGM_CONSTANT_GRAY = 128


def _image_array(image) -> np.ndarray:
    if isinstance(image, np.ndarray):
        return image
    if hasattr(image, "data") and isinstance(image.data, np.ndarray):
        return image.data
    return np.asarray(image)


def _as_grid(image) -> np.ndarray:
    data = _image_array(image)
    if data.ndim == 3:
        if data.shape[2] != 1:
            raise ShapeMismatch(
                "PGM export needs a single-channel image; "
                "flatten channels first"
            )
        data = data[:, :, 0]
    if data.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d grid, got ndim={data.ndim}")
    return np.asarray(data, dtype=np.float64)


def pgm_scale(grid: np.ndarray) -> np.ndarray:
    """Min-max rescale to 0..255 ints; a constant grid maps to mid gray."""
    lo, hi = float(grid.min()), float(grid.max())
    if hi == lo:
        return np.full(grid.shape, PGM_CONSTANT_GRAY, dtype=np.int64)
    scaled = (grid - lo) / (hi - lo) * PGM_MAXVAL
    return np.rint(scaled).astype(np.int64)


def save_pgm(image, path) -> None:
    """Write a single-channel image as ASCII PGM (P2, maxval 255)."""
    grid = _as_grid(image)
    pixels = pgm_scale(grid)
    rows, cols = pixels.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write("P2\n")
        fh.write(f"{cols} {rows}\n")
        fh.write(f"{PGM_MAXVAL}\n")
        for r in range(rows):
            fh.write(" ".join(str(int(v)) for v in pixels[r]) + "\n")


def load_pgm(path) -> np.ndarray:
    """Read back a P2 PGM (used by tests and the render round trip)."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if not tokens or tokens[0] != "P2":
        raise ShapeMismatch(f"{path}: not a P2 PGM")
    cols, rows, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    pixels = np.array(tokens[4:], dtype=np.int64)
    if pixels.size != rows * cols:
        raise ShapeMismatch(f"{path}: pixel count does not match header")
    if maxval != PGM_MAXVAL:
        raise ShapeMismatch(f"{path}: unexpected maxval {maxval}")
    return pixels.reshape(rows, cols)


def save_image_png(image, path, title: str = "") -> None:
    """Heatmap render of a tactile image; one panel per channel."""
    data = _image_array(image)
    if data.ndim == 2:
        data = data[:, :, None]
    channels = data.shape[2]
    fig, axes = plt.subplots(1, channels, figsize=(3.2 * channels, 3.2),
                             squeeze=False)
    for c in range(channels):
        ax = axes[0][c]
        im = ax.imshow(data[:, :, c], cmap="viridis", interpolation="nearest")
        ax.set_xticks([])
        ax.set_yticks([])
        if channels > 1:
            ax.set_title(("index", "middle", "thumb")[c], fontsize=9)
        fig.colorbar(im, ax=ax, fraction=0.046)
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_metrics_figure(report: dict, path) -> None:
    """Per-fold bars for each metric with the aggregate mean drawn across."""
    folds = report["folds"]
    idx = np.arange(len(folds))
    fig, axes = plt.subplots(2, 2, figsize=(8, 5.5), sharex=True)
    for ax, name in zip(axes.ravel(), METRIC_NAMES):
        vals = [f["metrics"][name] for f in folds]
        ax.bar(idx, vals, color="tab:blue", alpha=0.8)
        mean = report["aggregate"]["mean"][name]
        std = report["aggregate"]["std"][name]
        ax.axhline(mean, color="tab:red", linewidth=1.0)
        ax.set_title(f"{name}: {100 * mean:.1f}% ± {100 * std:.1f}%",
                     fontsize=10)
        ax.set_ylim(0.0, 1.05)
        ax.set_xlabel("fold")
    fig.suptitle(
        f"{report['config']['model']} / {report['config']['layout']} / "
        f"{report['config']['fill']} / {report['config']['compose']}",
        fontsize=11,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
