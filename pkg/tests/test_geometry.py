from collections import deque
from itertools import product

import numpy as np
import pytest

from stretchchaos.errors import GeometryError, MaskParseError
from stretchchaos.geometry import (
    BBox,
    GridMask,
    Path,
    RegionPredicate,
    grid_cut_check,
    grid_spanning_continuum,
    make_rect_from_chart,
    make_rect_from_graphs,
    sample_test_paths,
)


# --------------------------------------------------------------------------- #
# Oracles
# --------------------------------------------------------------------------- #
def free_corridor(cells):
    """Flood fill over 8-connected empty cells from the left column."""
    h, w = cells.shape
    seen = np.zeros_like(cells, dtype=bool)
    queue = deque((r, 0) for r in range(h) if not cells[r, 0])
    for r, c in queue:
        seen[r, c] = True
    while queue:
        r, c = queue.popleft()
        if c == w - 1:
            return True
        for dr, dc in product((-1, 0, 1), repeat=2):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and not cells[rr, cc] and not seen[rr, cc]:
                seen[rr, cc] = True
                queue.append((rr, cc))
    return False


def cuts_by_flood_fill(mask):
    return not free_corridor(mask.cells)


# --------------------------------------------------------------------------- #
# Regions and boxes
# --------------------------------------------------------------------------- #
def test_bbox_grid_is_cell_centred():
    grid = BBox(0.0, 2.0, 0.0, 1.0).grid(4, 2)
    assert grid.shape == (8, 2)
    assert grid[0] == pytest.approx([0.25, 0.25])
    assert grid[-1] == pytest.approx([1.75, 0.75])


def test_region_rejects_points_outside_its_box():
    calls = []

    def everything(pts):
        calls.append(len(pts))
        return np.ones(len(pts), dtype=bool)

    region = RegionPredicate(everything, BBox(0, 1, 0, 1), 0, "K")
    inside = region.contains(np.array([[0.5, 0.5], [2.0, 0.5], [-1.0, -1.0]]))
    assert inside.tolist() == [True, False, False]
    assert calls == [1]
    assert region.contains([0.2, 0.2]) is True


def test_preimage_and_union():
    left = RegionPredicate.box(0.0, 0.5, 0.0, 1.0, 0, "L")
    right = RegionPredicate.box(0.5, 1.0, 0.0, 1.0, 1, "R")
    doubling = lambda p: np.column_stack([2 * p[:, 0], p[:, 1]])  # noqa: E731
    pre = left.preimage(doubling, left, label=3)
    assert pre.label == 3
    assert pre.contains(np.array([[0.1, 0.5], [0.3, 0.5]])).tolist() == [True, False]
    both = RegionPredicate.union_of([left, right], label=2)
    assert both.contains(np.array([[0.1, 0.1], [0.9, 0.9], [1.5, 0.5]])).tolist() == [True, True, False]


def test_near_detects_points_just_outside():
    box = RegionPredicate.box(0.0, 1.0, 0.0, 1.0)
    assert not box.contains([1.0 + 1e-6, 0.5])
    assert box.near([1.0 + 1e-6, 0.5], 1e-5)


# --------------------------------------------------------------------------- #
# Oriented rectangles
# --------------------------------------------------------------------------- #
def test_unit_square_parameterization_is_identity(square):
    pts = square.param(np.array([0.0, 0.25, 1.0]), np.array([0.0, 0.5, 1.0]))
    assert pts == pytest.approx(np.array([[0.0, 0.0], [0.25, 0.5], [1.0, 1.0]]))
    assert square.side_param("left", [0.3])[0] == pytest.approx([0.0, 0.3])
    assert square.side_param("right", [0.3])[0] == pytest.approx([1.0, 0.3])
    assert square.contains(np.array([[0.5, 0.5], [1.5, 0.5]])).tolist() == [True, False]


def test_reoriented_swaps_designated_sides(square):
    turned = square.reoriented()
    s = np.linspace(0, 1, 5)
    assert turned.side_param("left", s) == pytest.approx(square.side_param("down", s))
    assert turned.side_param("right", s) == pytest.approx(square.side_param("up", s))


def test_side_distance_uses_exact_curve():
    disc_quarter = make_rect_from_graphs(lambda x: 0 * x, lambda x: np.sqrt(4 - x ** 2), 0.0, 1.0)
    d = disc_quarter.side_distance(np.array([[1.0, 0.5], [0.5, 0.5]]), "right")
    assert d[0] == pytest.approx(0.0, abs=1e-12)
    assert d[1] == pytest.approx(0.5, abs=1e-9)


def test_crossing_graphs_are_rejected():
    with pytest.raises(GeometryError):
        make_rect_from_graphs(lambda x: x, lambda x: 1 - x, 0.0, 1.0)
    with pytest.raises(GeometryError):
        make_rect_from_graphs(lambda x: 0 * x, lambda x: 0 * x + 1, 1.0, 1.0)


def test_chart_rectangle_of_an_annulus_sector():
    def chart(r, theta):
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    def coords(p):
        return np.hypot(p[:, 0], p[:, 1]), np.arctan2(p[:, 1], p[:, 0])

    rect = make_rect_from_chart(chart, coords, (1.0, 2.0), (0.0, np.pi / 2), name="sector")
    assert rect.contains(np.array([[1.5, 0.1], [0.5, 0.1], [-1.5, 0.1]])).tolist() == [True, False, False]
    assert np.hypot(*rect.side_left.T) == pytest.approx(np.ones(len(rect.side_left)))


# --------------------------------------------------------------------------- #
# Paths
# --------------------------------------------------------------------------- #
def test_path_validation():
    with pytest.raises(GeometryError):
        Path(np.array([0.1, 1.0]), np.zeros((2, 2)))
    with pytest.raises(GeometryError):
        Path(np.array([0.0, 0.6, 0.5, 1.0]), np.zeros((4, 2)))
    with pytest.raises(GeometryError):
        Path(np.array([0.0, 1.0]), np.array([[0.0, 0.0], [1.0, 0.0]]), tolerance=0.5)


def test_subpath_and_glue():
    seg = Path.segment([0.0, 0.0], [1.0, 0.0], n_samples=11)
    sub = seg.subpath(0.25, 0.75)
    assert sub.start == pytest.approx([0.25, 0.0])
    assert sub.end == pytest.approx([0.75, 0.0])
    back = Path.segment([1.0, 0.0], [1.0, 1.0], n_samples=11)
    glued = seg.glue(back)
    assert glued.end == pytest.approx([1.0, 1.0])
    assert glued.at(0.5)[0] == pytest.approx([1.0, 0.0])


def test_test_paths_join_the_sides_and_are_reproducible(square):
    paths = sample_test_paths(square, n_paths=12, n_samples=64, seed=3)
    again = sample_test_paths(square, n_paths=12, n_samples=64, seed=3)
    assert len(paths) == 12
    for p, q in zip(paths, again):
        assert np.array_equal(p.points, q.points)
        assert p.start[0] == pytest.approx(0.0)
        assert p.end[0] == pytest.approx(1.0)
        assert square.contains(p.points).all()
    fibers = [p for p in paths if p.name.startswith("fiber")]
    assert fibers[0].points[:, 1] == pytest.approx(np.zeros(64))
    assert fibers[-1].points[:, 1] == pytest.approx(np.ones(64))


def test_fibers_follow_the_exact_curve_between_samples():
    def chart(theta, r):
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    def coords(p):
        return np.arctan2(p[:, 1], p[:, 0]), np.hypot(p[:, 0], p[:, 1])

    rect = make_rect_from_chart(chart, coords, (0.0, np.pi / 2), (1.0, 2.0), name="arcs")
    inner = sample_test_paths(rect, n_paths=4, n_samples=5)[0]
    between = np.array([0.1, 0.37, 0.9])
    assert np.hypot(*inner.at(between).T) == pytest.approx(np.ones(3), abs=1e-12)
    # the chord through neighbouring samples cuts inside the unit circle
    chord = np.interp(0.125, inner.params, inner.points[:, 0]), np.interp(0.125, inner.params, inner.points[:, 1])
    assert np.hypot(*chord) < 0.99
    sub = inner.subpath(0.2, 0.6)
    assert sub.curve is not None
    assert np.hypot(*sub.at(0.5)[0]) == pytest.approx(1.0, abs=1e-12)
    assert sub.at(0.5)[0] == pytest.approx(inner.at(0.4)[0])
    assert inner.resample(9).curve is inner.curve


# --------------------------------------------------------------------------- #
# Grid masks
# --------------------------------------------------------------------------- #
def test_full_and_empty_masks():
    assert grid_cut_check(GridMask.full(5, 4))
    assert not grid_cut_check(GridMask.empty(5, 4))
    assert grid_spanning_continuum(GridMask.empty(5, 4)) is None


def test_all_three_by_three_masks_agree_with_flood_fill():
    for bits in range(512):
        cells = np.array([(bits >> i) & 1 for i in range(9)], dtype=bool).reshape(3, 3)
        mask = GridMask.from_array(cells)
        cut = grid_cut_check(mask)
        assert cut == cuts_by_flood_fill(mask), bits
        assert cut == (grid_spanning_continuum(mask) is not None), bits


def test_random_masks_agree_with_flood_fill(rng):
    for _ in range(100):
        mask = GridMask.from_array(rng.random((32, 32)) < 0.55)
        assert grid_cut_check(mask) == cuts_by_flood_fill(mask)


@pytest.mark.slow
def test_many_large_random_masks_agree_with_flood_fill(rng):
    for density in np.linspace(0.4, 0.7, 1000):
        mask = GridMask.from_array(rng.random((64, 64)) < density)
        cut = grid_cut_check(mask)
        assert cut == cuts_by_flood_fill(mask)
        assert cut == (grid_spanning_continuum(mask) is not None)


def test_spanning_continuum_touches_bottom_and_top():
    cells = np.zeros((5, 5), dtype=bool)
    cells[:, 2] = True
    cells[2, 3] = True
    cells[0, 0] = True
    span = grid_spanning_continuum(GridMask.from_array(cells))
    assert span is not None
    assert span.cells[:, 2].all()
    assert span.cells[2, 3]
    assert not span.cells[0, 0]


def test_down_up_direction_transposes():
    cells = np.zeros((4, 4), dtype=bool)
    cells[1, :] = True
    mask = GridMask.from_array(cells)
    assert not grid_cut_check(mask, "left_right")
    assert grid_cut_check(mask, "down_up")


def test_pbm_text_puts_row_zero_at_the_bottom(tmp_path):
    mask = GridMask.from_pbm("P1\n# comment\n3 2\n1 1 1\n0 0 1\n")
    assert mask.cells[0].tolist() == [False, False, True]
    assert mask.cells[1].tolist() == [True, True, True]
    path = mask.write_pbm(tmp_path / "m.pbm")
    assert GridMask.read_pbm(path) == mask


@pytest.mark.parametrize("text", ["P2\n1 1\n1\n", "P1\n2\n", "P1\n2 2\n1 0 1\n", "P1\n1 1\n7\n"])
def test_malformed_pbm(text):
    with pytest.raises(MaskParseError):
        GridMask.from_pbm(text)
