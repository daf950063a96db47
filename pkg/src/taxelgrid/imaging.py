"""Tactile image construction from 24-electrode finger readings.

A finger reading is a length-24 float array. Placing it on a layout grid
yields a sparse image (electrode cells + gaps); the two fill strategies turn
that into a dense single-channel image. Three per-finger images compose into
one model input. All functions are pure; returned arrays are read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AngleOutOfRange,
    NoElectrodes,
    ShapeMismatch,
    ZeroVariance,
)
from .layouts import N_ELECTRODES, SensorLayout

COMPOSE_MODES = ("horizontal", "vertical", "channels")
FLIP_AXES = ("vertical", "horizontal")
MAX_ROTATION_DEG = 10.0


def as_reading(values) -> np.ndarray:
    """Validate and convert a finger reading to a (24,) float64 array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (N_ELECTRODES,):
        raise ShapeMismatch(
            f"finger reading must have {N_ELECTRODES} values, got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("finger reading contains non-finite values")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SparseTactileImage:
    """Grid with 24 electrode cells (mask True) and gaps everywhere else."""

    rows: int
    cols: int
    values: np.ndarray = field(repr=False)  # (rows, cols), zeros at gaps
    mask: np.ndarray = field(repr=False)    # (rows, cols) bool, True=electrode

    def __post_init__(self):
        if self.values.shape != (self.rows, self.cols):
            raise ShapeMismatch("values grid does not match declared dims")
        if self.mask.shape != (self.rows, self.cols):
            raise ShapeMismatch("mask grid does not match declared dims")
        if int(self.mask.sum()) != N_ELECTRODES:
            raise ShapeMismatch(
                f"expected {N_ELECTRODES} electrode cells, "
                f"got {int(self.mask.sum())}"
            )
        _freeze(self.values)
        _freeze(self.mask)

    def electrode_values(self) -> np.ndarray:
        return self.values[self.mask]


@dataclass(frozen=True)
class TactileImage:
    """Dense rows x cols x channels grid of finite reals (channel-last)."""

    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ShapeMismatch(
                f"tactile image must be rows x cols x channels, "
                f"got ndim={self.data.ndim}"
            )
        if self.data.shape[2] not in (1, 3):
            raise ShapeMismatch(
                f"channels must be 1 or 3, got {self.data.shape[2]}"
            )
        if not np.all(np.isfinite(self.data)):
            raise ValueError("tactile image contains non-finite values")
        _freeze(self.data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @staticmethod
    def from_grid(grid: np.ndarray) -> "TactileImage":
        """Wrap a 2-D grid as a single-channel image."""
        grid = np.asarray(grid, dtype=np.float64)
        if grid.ndim != 2:
            raise ShapeMismatch("from_grid expects a 2-D array")
        return TactileImage(data=grid.reshape(*grid.shape, 1).copy())


def zscore_normalize(reading) -> np.ndarray:
    """Standardize a finger's 24 values: z = (x - mean) / population std."""
    arr = as_reading(reading)
    # equality check, not sigma == 0: the float mean of 24 identical values
    # can be off by an ulp, leaving a denormal-scale sigma
    if np.all(arr == arr[0]):
        raise ZeroVariance(
            "all 24 electrode values are equal; degenerate reading"
        )
    mu = arr.mean()
    sigma = arr.std()  # population (ddof=0)
    return (arr - mu) / sigma


def build_sparse_image(reading, layout: SensorLayout) -> SparseTactileImage:
    """Place the 24 values on the layout grid; every other cell is a gap."""
    arr = as_reading(reading)
    values = np.zeros((layout.rows, layout.cols), dtype=np.float64)
    cells = layout.cell_of()
    values[cells[:, 0], cells[:, 1]] = arr
    return SparseTactileImage(
        rows=layout.rows,
        cols=layout.cols,
        values=values,
        mask=layout.electrode_mask().copy(),
    )


def recover_reading(img: SparseTactileImage, layout: SensorLayout) -> np.ndarray:
    """Invert build_sparse_image for the generating layout."""
    cells = layout.cell_of()
    return img.values[cells[:, 0], cells[:, 1]].copy()


def fill_min_electrode(img: SparseTactileImage) -> TactileImage:
    """Fill every gap with the minimum (least contacted) electrode value."""
    out = img.values.copy()
    out[~img.mask] = img.electrode_values().min()
    return TactileImage.from_grid(out)


def _neighbor_sums(values: np.ndarray, known: np.ndarray):
    """Sum and count of known values over each cell's 8-neighborhood."""
    rows, cols = values.shape
    vp = np.zeros((rows + 2, cols + 2), dtype=np.float64)
    kp = np.zeros((rows + 2, cols + 2), dtype=np.float64)
    vp[1:-1, 1:-1] = np.where(known, values, 0.0)
    kp[1:-1, 1:-1] = known
    nsum = np.zeros_like(values)
    ncnt = np.zeros_like(values)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            nsum += vp[1 + dr : rows + 1 + dr, 1 + dc : cols + 1 + dc]
            ncnt += kp[1 + dr : rows + 1 + dr, 1 + dc : cols + 1 + dc]
    return nsum, ncnt


def fill_neighbor_mean(img: SparseTactileImage) -> TactileImage:
    """Fill gaps with the mean of known values in their 3x3 neighborhood.

    Passes repeat until no gap remains: each pass fills every still-empty
    cell that has at least one known 8-neighbor with the mean of the known
    neighbors from the previous pass. Sparse layouts (d1's 108 gaps) need
    several passes. Electrode cells are never modified.
    """
    if not img.mask.any():
        raise NoElectrodes("cannot fill an image with no electrode cells")
    values = img.values.copy()
    known = img.mask.copy()
    while not known.all():
        nsum, ncnt = _neighbor_sums(values, known)
        fillable = ~known & (ncnt > 0)
        # The grid is 8-connected, so at least one gap borders a known cell.
        values[fillable] = nsum[fillable] / ncnt[fillable]
        known |= fillable
    return TactileImage.from_grid(values)


def compose(images, mode: str) -> TactileImage:
    """Join three single-channel finger images (index, middle, thumb)."""
    if mode not in COMPOSE_MODES:
        raise ValueError(f"mode must be one of {COMPOSE_MODES}, got {mode!r}")
    if len(images) != 3:
        raise ShapeMismatch(f"compose expects 3 images, got {len(images)}")
    shapes = {im.shape for im in images}
    if len(shapes) != 1:
        raise ShapeMismatch(f"finger images differ in shape: {shapes}")
    if images[0].channels != 1:
        raise ShapeMismatch("compose expects single-channel finger images")
    arrays = [im.data for im in images]
    if mode == "horizontal":
        data = np.concatenate(arrays, axis=1)
    elif mode == "vertical":
        data = np.concatenate(arrays, axis=0)
    else:
        data = np.concatenate(arrays, axis=2)
    return TactileImage(data=data.copy())


def decompose(img: TactileImage, mode: str):
    """Recover the three per-finger images from a composed image."""
    if mode not in COMPOSE_MODES:
        raise ValueError(f"mode must be one of {COMPOSE_MODES}, got {mode!r}")
    if mode == "horizontal":
        if img.cols % 3 != 0 or img.channels != 1:
            raise ShapeMismatch("not a horizontal composition of 3 fingers")
        w = img.cols // 3
        parts = [img.data[:, i * w : (i + 1) * w, :] for i in range(3)]
    elif mode == "vertical":
        if img.rows % 3 != 0 or img.channels != 1:
            raise ShapeMismatch("not a vertical composition of 3 fingers")
        h = img.rows // 3
        parts = [img.data[i * h : (i + 1) * h, :, :] for i in range(3)]
    else:
        if img.channels != 3:
            raise ShapeMismatch("not a three-channel composition")
        parts = [img.data[:, :, i : i + 1] for i in range(3)]
    return tuple(TactileImage(data=p.copy()) for p in parts)


def flip(img: TactileImage, axis: str) -> TactileImage:
    """Reverse row order (vertical) or column order (horizontal)."""
    if axis not in FLIP_AXES:
        raise ValueError(f"axis must be one of {FLIP_AXES}, got {axis!r}")
    if axis == "vertical":
        data = img.data[::-1, :, :]
    else:
        data = img.data[:, ::-1, :]
    return TactileImage(data=data.copy())


def rotate(img: TactileImage, angle_deg: float) -> TactileImage:
    """Rotate about the grid center by up to +/-10 degrees.

    Inverse mapping with bilinear interpolation; source coordinates falling
    outside the grid clamp to the nearest edge, so no value can leave the
    range the electrodes produced. Applied identically per channel.
    """
    if not np.isfinite(angle_deg) or abs(angle_deg) > MAX_ROTATION_DEG:
        raise AngleOutOfRange(
            f"|angle| must be <= {MAX_ROTATION_DEG} degrees, got {angle_deg}"
        )
    rows, cols = img.rows, img.cols
    theta = np.deg2rad(angle_deg)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    rc, cc = (rows - 1) / 2.0, (cols - 1) / 2.0

    r_idx, c_idx = np.meshgrid(
        np.arange(rows, dtype=np.float64),
        np.arange(cols, dtype=np.float64),
        indexing="ij",
    )
    dr, dc = r_idx - rc, c_idx - cc
    src_r = np.clip(cos_t * dr - sin_t * dc + rc, 0.0, rows - 1.0)
    src_c = np.clip(sin_t * dr + cos_t * dc + cc, 0.0, cols - 1.0)

    r0 = np.floor(src_r).astype(np.intp)
    c0 = np.floor(src_c).astype(np.intp)
    r1 = np.minimum(r0 + 1, rows - 1)
    c1 = np.minimum(c0 + 1, cols - 1)
    wr = (src_r - r0)[..., None]
    wc = (src_c - c0)[..., None]

    d = img.data
    data = (
        d[r0, c0] * (1.0 - wr) * (1.0 - wc)
        + d[r1, c0] * wr * (1.0 - wc)
        + d[r0, c1] * (1.0 - wr) * wc
        + d[r1, c1] * wr * wc
    )
    return TactileImage(data=data)
