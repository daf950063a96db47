"""Electrode layouts: injective maps from 24 electrode indices to grid cells.

Built-in layouts d1 (12x11), d2 (6x5) and d3 (4x7) ship as data files; any
layout with the same invariants can be loaded from a plain-text file of the
form::

    layout <name> <rows> <cols>
    <electrode_index> <row> <col>     # one line per electrode, 24 lines

Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

import numpy as np

from .errors import LayoutError, ParseError

N_ELECTRODES = 24

BUILTIN_DIMS = {"d1": (12, 11), "d2": (6, 5), "d3": (4, 7)}


@dataclass(frozen=True)
class SensorLayout:
    """Where each of the 24 electrodes sits on an rows x cols grid."""

    name: str
    rows: int
    cols: int
    # placements[i] = (electrode_index, row, col)
    placements: tuple = field(repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise LayoutError(f"{self.name}: grid dims must be positive")
        if len(self.placements) != N_ELECTRODES:
            raise LayoutError(
                f"{self.name}: expected {N_ELECTRODES} placements, "
                f"got {len(self.placements)}"
            )
        electrodes = sorted(e for e, _, _ in self.placements)
        if electrodes != list(range(N_ELECTRODES)):
            raise LayoutError(
                f"{self.name}: electrode indices must be a permutation of "
                f"0..{N_ELECTRODES - 1}"
            )
        cells = set()
        for e, r, c in self.placements:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise LayoutError(
                    f"{self.name}: electrode {e} at ({r}, {c}) is out of "
                    f"bounds for {self.rows}x{self.cols}"
                )
            if (r, c) in cells:
                raise LayoutError(
                    f"{self.name}: cell ({r}, {c}) is assigned twice"
                )
            cells.add((r, c))

    def cell_of(self) -> np.ndarray:
        """(24, 2) array: row i holds the (row, col) of electrode i."""
        out = np.zeros((N_ELECTRODES, 2), dtype=np.intp)
        for e, r, c in self.placements:
            out[e] = (r, c)
        return out

    def electrode_mask(self) -> np.ndarray:
        """Boolean rows x cols grid, True where an electrode sits."""
        mask = np.zeros((self.rows, self.cols), dtype=bool)
        cells = self.cell_of()
        mask[cells[:, 0], cells[:, 1]] = True
        return mask


def parse_layout(text: str, source: str = "<string>") -> SensorLayout:
    """Parse the line-oriented layout format. Raises ParseError/LayoutError."""
    header = None
    placements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "layout" or len(parts) != 4:
                raise ParseError(
                    f"{source}: expected 'layout <name> <rows> <cols>'",
                    line=lineno,
                )
            try:
                header = (parts[1], int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"{source}: bad header dims", line=lineno)
            continue
        if len(parts) != 3:
            raise ParseError(
                f"{source}: expected '<electrode> <row> <col>'", line=lineno
            )
        try:
            placements.append((int(parts[0]), int(parts[1]), int(parts[2])))
        except ValueError:
            raise ParseError(f"{source}: non-integer placement", line=lineno)
    if header is None:
        raise ParseError(f"{source}: missing layout header")
    name, rows, cols = header
    return SensorLayout(name=name, rows=rows, cols=cols,
                        placements=tuple(placements))


def load_layout(path) -> SensorLayout:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_layout(fh.read(), source=str(path))


def dump_layout(layout: SensorLayout) -> str:
    lines = [f"layout {layout.name} {layout.rows} {layout.cols}"]
    for e, r, c in sorted(layout.placements):
        lines.append(f"{e} {r} {c}")
    return "\n".join(lines) + "\n"


def save_layout(layout: SensorLayout, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_layout(layout))


_cache: dict = {}


def get_layout(name: str) -> SensorLayout:
    """Fetch a built-in layout (d1, d2, d3) by name."""
    key = name.lower()
    if key not in BUILTIN_DIMS:
        raise LayoutError(
            f"unknown layout {name!r}; built-ins are {sorted(BUILTIN_DIMS)}"
        )
    if key not in _cache:
        ref = importlib.resources.files("taxelgrid.data.layouts")
        layout = parse_layout(
            (ref / f"{key}.layout").read_text(encoding="utf-8"),
            source=f"{key}.layout",
        )
        expected = BUILTIN_DIMS[key]
        if (layout.rows, layout.cols) != expected:
            raise LayoutError(
                f"built-in {key} must be {expected[0]}x{expected[1]}"
            )
        _cache[key] = layout
    return _cache[key]


def resolve_layout(name_or_path: str) -> SensorLayout:
    """Built-in name, else a path to a layout file."""
    if name_or_path.lower() in BUILTIN_DIMS:
        return get_layout(name_or_path)
    import os

    if os.path.exists(name_or_path):
        return load_layout(name_or_path)
    raise LayoutError(
        f"{name_or_path!r} is neither a built-in layout nor a readable file"
    )
