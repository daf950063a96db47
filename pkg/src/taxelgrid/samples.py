"""Grasp samples: three finger readings plus label and bookkeeping fields."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ShapeMismatch
from .imaging import as_reading

LABELS = ("stable", "slippery")
STABLE, SLIPPERY = LABELS
ORIENTATIONS = ("palm_down", "palm_side")
FINGERS = ("index", "middle", "thumb")


@dataclass(frozen=True)
class GraspSample:
    """One pre-lift grasp: readings for index, middle and thumb fingers."""

    fingers: tuple  # 3 arrays of 24 floats, order per FINGERS
    label: str
    object_id: str
    orientation: str
    sample_id: str

    def __post_init__(self):
        if len(self.fingers) != 3:
            raise ShapeMismatch(
                f"expected 3 finger readings, got {len(self.fingers)}"
            )
        object.__setattr__(
            self, "fingers", tuple(as_reading(f) for f in self.fingers)
        )
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(
                f"orientation must be one of {ORIENTATIONS}, "
                f"got {self.orientation!r}"
            )

    def flat_values(self) -> np.ndarray:
        """All 72 raw electrode values, finger-major (index, middle, thumb)."""
        return np.concatenate(self.fingers)


@dataclass(frozen=True)
class PreprocessedSample:
    """Model-ready input: an image (H, W, C) or a flat feature vector (72,)."""

    x: np.ndarray = field(repr=False)
    label: str
    object_id: str
    sample_id: str
    provenance: str = "original"

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        self.x.setflags(write=False)

    def derived(self, x: np.ndarray, provenance: str) -> "PreprocessedSample":
        """Variant with new pixel data; label and object id are preserved."""
        return replace(
            self,
            x=x,
            sample_id=f"{self.sample_id}:{provenance}",
            provenance=provenance,
        )


def label_index(label: str) -> int:
    """Class order is (stable, slippery); stable is the positive class."""
    return LABELS.index(label)
