import numpy as np
import pytest

from taxelgrid.errors import LayoutError, ParseError
from taxelgrid.layouts import (
    BUILTIN_DIMS,
    SensorLayout,
    dump_layout,
    get_layout,
    load_layout,
    parse_layout,
    resolve_layout,
    save_layout,
)

BUILTINS = ("d1", "d2", "d3")


@pytest.mark.parametrize("name,dims", [("d1", (12, 11)), ("d2", (6, 5)),
                                       ("d3", (4, 7))])
def test_builtin_dims(name, dims):
    layout = get_layout(name)
    assert (layout.rows, layout.cols) == dims
    assert len(layout.placements) == 24


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_injective_in_bounds(name):
    layout = get_layout(name)
    electrodes = sorted(e for e, _, _ in layout.placements)
    assert electrodes == list(range(24))
    cells = [(r, c) for _, r, c in layout.placements]
    assert len(set(cells)) == 24
    for r, c in cells:
        assert 0 <= r < layout.rows
        assert 0 <= c < layout.cols
    assert int(layout.electrode_mask().sum()) == 24


def test_cell_of_matches_placements():
    layout = get_layout("d2")
    cells = layout.cell_of()
    for e, r, c in layout.placements:
        assert tuple(cells[e]) == (r, c)


def test_dump_parse_round_trip():
    layout = get_layout("d1")
    again = parse_layout(dump_layout(layout))
    assert again == layout


def test_save_load_file(tmp_path):
    layout = get_layout("d3")
    path = tmp_path / "custom.layout"
    save_layout(layout, path)
    assert load_layout(path) == layout


def test_comments_and_blank_lines_ignored():
    text = dump_layout(get_layout("d2"))
    noisy = "# heading\n\n" + text.replace("layout d2 6 5",
                                           "layout d2 6 5  # dims")
    assert parse_layout(noisy) == get_layout("d2")


def test_user_layout_loadable(tmp_path):
    # same grid as d2, different electrode numbering
    placements = tuple(
        (23 - e, r, c) for e, r, c in get_layout("d2").placements
    )
    layout = SensorLayout(name="flipped", rows=6, cols=5,
                          placements=placements)
    path = tmp_path / "flipped.layout"
    save_layout(layout, path)
    loaded = resolve_layout(str(path))
    assert sorted(loaded.placements) == sorted(layout.placements)


def test_duplicate_cell_rejected():
    placements = list(get_layout("d2").placements)
    e, r, c = placements[0]
    placements[1] = (placements[1][0], r, c)
    with pytest.raises(LayoutError, match="twice"):
        SensorLayout(name="dup", rows=6, cols=5, placements=tuple(placements))


def test_out_of_bounds_rejected():
    placements = list(get_layout("d2").placements)
    placements[0] = (placements[0][0], 6, 0)
    with pytest.raises(LayoutError, match="out of bounds"):
        SensorLayout(name="oob", rows=6, cols=5, placements=tuple(placements))


def test_wrong_count_rejected():
    placements = get_layout("d2").placements[:-1]
    with pytest.raises(LayoutError, match="24"):
        SensorLayout(name="short", rows=6, cols=5, placements=placements)


def test_not_a_permutation_rejected():
    placements = list(get_layout("d2").placements)
    placements[0] = (placements[1][0], *placements[0][1:])
    with pytest.raises(LayoutError, match="permutation"):
        SensorLayout(name="dupidx", rows=6, cols=5,
                     placements=tuple(placements))


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_layout("not-a-header 1 2 3\n0 0 0\n")
    good = dump_layout(get_layout("d2"))
    broken = good.replace("\n5 1 2\n", "\n5 1\n")
    with pytest.raises(ParseError, match="line"):
        parse_layout(broken)
    with pytest.raises(ParseError, match="header"):
        parse_layout("# only a comment\n")


def test_unknown_builtin():
    with pytest.raises(LayoutError, match="unknown layout"):
        get_layout("d9")
    with pytest.raises(LayoutError):
        resolve_layout("no-such-file.layout")


def test_builtin_names_registry():
    assert set(BUILTIN_DIMS) == set(BUILTINS)
