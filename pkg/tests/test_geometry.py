import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attnpoints.geometry import (
    BoxParams,
    OrientedBox,
    box_area,
    contains_exact,
    convex_intersection,
    edge_triangle_areas,
    intersection_area,
    rotated_iou,
    signed_area,
    triangle_area,
)
from oracles import halfplane_contains, random_convex_quad, random_rect_vertices, shapely_iou

UNIT = OrientedBox([[0, 0], [1, 0], [1, 1], [0, 1]])


@pytest.mark.parametrize("a, b, c, expected", [
    ((0, 0), (1, 0), (0, 1), 0.5),
    ((0, 0), (1, 0), (2, 0), 0.0),
    ((0, 0), (3, 0), (0, 4), 6.0),
])
def test_triangle_area(a, b, c, expected):
    assert triangle_area(a, b, c) == pytest.approx(expected, abs=1e-15)


def test_triangle_area_broadcasts():
    a = np.zeros((3, 2))
    b = np.array([[1, 0], [2, 0], [3, 0]])
    c = np.array([[0, 1], [0, 1], [0, 2]])
    np.testing.assert_allclose(triangle_area(a, b, c), [0.5, 1.0, 3.0])


@pytest.mark.parametrize("box, expected", [
    (UNIT, 1.0),
    (OrientedBox.from_params(0, 0, 2, 3, 0), 6.0),
    (OrientedBox.from_params(5, 5, 2, 3, math.pi / 6), 6.0),
])
def test_box_area(box, expected):
    assert box_area(box) == pytest.approx(expected, rel=1e-12)


def test_box_area_of_raw_vertices_batch():
    rng = np.random.default_rng(0)
    v = random_rect_vertices(rng, 5)
    assert box_area(v).shape == (5,)


class TestOrientedBox:
    def test_clockwise_input_is_reversed(self):
        box = OrientedBox([[0, 0], [0, 1], [1, 1], [1, 0]])
        assert signed_area(box.vertices) > 0
        np.testing.assert_array_equal(box.vertices[0], [0, 0])

    def test_vertices_are_read_only(self):
        with pytest.raises(ValueError):
            UNIT.vertices[0, 0] = 5.0

    @pytest.mark.parametrize("verts", [
        [[0, 0], [1, 0], [2, 0], [3, 0]],
        [[0, 0], [0, 0], [0, 0], [0, 0]],
        [[0, 0], [2, 0], [0.5, 0.5], [0, 2]],  # reflex vertex
        [[0, 0], [1, 1], [1, 0], [0, 1]],  # bow-tie
        [[0, 0], [1, 0], [1, float("nan")], [0, 1]],
    ])
    def test_invalid_vertices_rejected(self, verts):
        with pytest.raises(ValueError):
            OrientedBox(verts)

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            OrientedBox([[0, 0], [1, 0], [1, 1]])

    @pytest.mark.parametrize("w, h", [(0, 1), (1, -2)])
    def test_nonpositive_sides_rejected(self, w, h):
        with pytest.raises(ValueError):
            BoxParams(0, 0, w, h, 0)

    @settings(max_examples=200, deadline=None)
    @given(cx=st.floats(-1e3, 1e3), cy=st.floats(-1e3, 1e3),
           w=st.floats(1e-2, 1e3), h=st.floats(1e-2, 1e3),
           theta=st.floats(-10, 10))
    def test_params_round_trip(self, cx, cy, w, h, theta):
        box = OrientedBox.from_params(cx, cy, w, h, theta)
        scale = max(abs(cx), abs(cy), w, h)
        assert box.area == pytest.approx(w * h, rel=1e-9)
        np.testing.assert_allclose(box.center, [cx, cy], atol=1e-9 * scale)
        back = box.to_params()
        assert back.w == pytest.approx(w, rel=1e-9)
        assert back.h == pytest.approx(h, rel=1e-9)
        again = back.to_box()
        np.testing.assert_allclose(again.vertices, box.vertices, atol=1e-9 * scale)


@pytest.mark.parametrize("p, expected", [
    ((0.5, 0.5), (0.25, 0.25, 0.25, 0.25)),
    ((2, 0.5), (0.25, 0.5, 0.25, 1.0)),
    ((0, 0), (0.0, 0.5, 0.5, 0.0)),
])
def test_edge_triangle_areas(p, expected):
    # expected values from the per-triangle shoelace oracle
    np.testing.assert_allclose(edge_triangle_areas(p, UNIT), expected, atol=1e-15)


@pytest.mark.parametrize("p, expected", [
    ((0.5, 0.5), 1),
    ((2, 0.5), 0),
    ((1.0, 0.5), 1),
    ((0, 0), 1),
    ((1 + 1e-6, 0.5), 0),
])
def test_contains_exact_examples(p, expected):
    assert contains_exact(p, UNIT) == expected


def test_center_of_any_box_is_inside():
    rng = np.random.default_rng(1)
    for _ in range(50):
        box = OrientedBox(random_convex_quad(rng))
        assert contains_exact(box.center, box) == 1


class TestPartition:
    def test_interior_sum_equals_area(self):
        rng = np.random.default_rng(2)
        v = random_rect_vertices(rng, 2000)
        # convex combination of the vertices is interior
        w = rng.dirichlet(np.ones(4), size=len(v))
        p = np.einsum("nk,nkd->nd", w, v)
        total = edge_triangle_areas(p, v).sum(axis=-1)
        area = box_area(v)
        assert np.all(np.abs(total - area) <= 1e-9 * area)

    def test_exterior_sum_exceeds_area(self):
        rng = np.random.default_rng(3)
        v = random_rect_vertices(rng, 2000)
        p = rng.uniform(-25, 25, (len(v), 2))
        outside = ~halfplane_contains(p, v)
        total = edge_triangle_areas(p, v).sum(axis=-1)
        assert outside.sum() > 1000
        assert np.all(total[outside] > box_area(v)[outside])

    def test_agrees_with_halfplane_oracle_on_general_quads(self):
        rng = np.random.default_rng(4)
        quads = np.stack([random_convex_quad(rng) for _ in range(500)])
        p = rng.uniform(-10, 10, (500, 2))
        np.testing.assert_array_equal(contains_exact(p, quads),
                                      halfplane_contains(p, quads).astype(int))


class TestIntersection:
    def test_identical_boxes(self):
        box = OrientedBox.from_params(3, 1, 2, 5, 0.4)
        poly = convex_intersection(box, box)
        assert signed_area(poly) == pytest.approx(box.area, rel=1e-12)
        assert rotated_iou(box, box) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_boxes(self):
        other = UNIT.translated(5, 0)
        assert convex_intersection(UNIT, other).shape == (0, 2)
        assert rotated_iou(UNIT, other) == 0.0

    def test_offset_unit_squares(self):
        other = UNIT.translated(0.5, 0)
        poly = convex_intersection(UNIT, other)
        assert signed_area(poly) == pytest.approx(0.5, abs=1e-15)
        assert rotated_iou(UNIT, other) == pytest.approx(1 / 3, abs=1e-12)

    def test_touching_edges_have_zero_overlap(self):
        assert intersection_area(UNIT, UNIT.translated(1, 0)) == pytest.approx(0.0, abs=1e-15)

    def test_result_is_counter_clockwise(self):
        a = OrientedBox.from_params(0, 0, 4, 2, 0.3)
        b = OrientedBox.from_params(1, 0.5, 3, 3, -0.9)
        assert signed_area(convex_intersection(a, b)) > 0

    def test_matches_shapely(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            a, b = OrientedBox(random_convex_quad(rng)), OrientedBox(random_convex_quad(rng))
            assert rotated_iou(a, b) == pytest.approx(shapely_iou(a.vertices, b.vertices),
                                                      abs=1e-9)


@pytest.fixture(scope="module")
def pairs():
    rng = np.random.default_rng(6)
    v = random_rect_vertices(rng, 400, scale=3.0)
    return [(OrientedBox(v[i]), OrientedBox(v[i + 1])) for i in range(0, 400, 2)]


class TestIoUProperties:
    def test_symmetric_and_bounded(self, pairs):
        for a, b in pairs:
            iou = rotated_iou(a, b)
            assert 0.0 <= iou <= 1.0
            assert iou == pytest.approx(rotated_iou(b, a), abs=1e-12)

    def test_intersection_not_larger_than_either(self, pairs):
        for a, b in pairs:
            assert intersection_area(a, b) <= min(a.area, b.area) * (1 + 1e-12)

    def test_rigid_motion_invariance(self, pairs):
        rng = np.random.default_rng(7)
        for a, b in pairs:
            th = rng.uniform(-math.pi, math.pi)
            rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            shift = rng.uniform(-50, 50, 2)
            ta = OrientedBox(a.vertices @ rot.T + shift)
            tb = OrientedBox(b.vertices @ rot.T + shift)
            assert rotated_iou(ta, tb) == pytest.approx(rotated_iou(a, b), abs=1e-9)

    def test_one_only_when_coincident(self, pairs):
        for a, b in pairs:
            assert rotated_iou(a, b) < 1.0
        a = OrientedBox.from_params(0, 0, 2, 1, 0.3)
        assert rotated_iou(a, OrientedBox.from_params(0, 0, 2, 1, 0.3 + 1e-3)) < 1.0
