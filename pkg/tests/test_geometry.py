import math

import numpy as np
import pytest

from stitlab.errors import DegenerateCut, GeometryError, NoIntersection, ZeroLength
from stitlab.geometry import (
    Face3,
    Hyperplane,
    Polygon,
    Polyhedron,
    Segment,
    box,
    point_on_segment_interior,
    rectangle,
    split_polytope,
    width,
)

SQRT2 = math.sqrt(2.0)


from conftest import random_convex_polygon


class TestHyperplane:
    def test_canonical_upper_half(self):
        h = Hyperplane.from_normal_offset([0.0, -2.0], -1.0)
        assert h.normal[1] > 0
        assert h.offset == pytest.approx(0.5)

    def test_canonical_tie_break_on_equator(self):
        h = Hyperplane.from_normal_offset([-3.0, 0.0], 1.5)
        assert h.normal[0] > 0
        assert h.offset == pytest.approx(-0.5)

    def test_canonicalization_idempotent(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            n = rng.standard_normal(3)
            c = rng.standard_normal()
            h1 = Hyperplane.from_normal_offset(n, c)
            h2 = h1.canonical()
            assert np.allclose(h1.normal, h2.normal)
            assert h1.offset == pytest.approx(h2.offset, abs=1e-15)
            assert abs(np.linalg.norm(h1.normal) - 1.0) <= 1e-12

    def test_signed_distance(self):
        h = Hyperplane.from_normal_offset([1.0, 0.0], 0.25)
        d = h.signed_distance(np.array([[1.0, 3.0], [0.0, -1.0]]))
        assert d == pytest.approx([0.75, -0.25])


class TestPolygonSplit:
    def test_axis_cut_of_square(self):
        sq = rectangle(0, 0, 1, 1)
        plus, minus, face = split_polytope(sq, Hyperplane.from_normal_offset([1, 0], 0.3))
        assert minus.area == pytest.approx(0.3)
        assert plus.area == pytest.approx(0.7)
        assert face.length == pytest.approx(1.0)

    def test_diagonal_cut_of_square(self):
        sq = rectangle(0, 0, 1, 1)
        plus, minus, face = split_polytope(sq, Hyperplane.from_normal_offset([1, 1], 1.0))
        assert plus.area == pytest.approx(0.5)
        assert minus.area == pytest.approx(0.5)
        assert face.length == pytest.approx(SQRT2)

    def test_face_labels_follow_the_stored_normal(self):
        sq = rectangle(0, 0, 1, 1)
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = rng.standard_normal(2)
            h = Hyperplane.from_normal_offset(n, float(rng.uniform(-0.2, 0.2)))
            try:
                plus, minus, _ = split_polytope(sq, h)
            except (NoIntersection, DegenerateCut):
                continue
            assert h.signed_distance(plus.centroid) > 0
            assert h.signed_distance(minus.centroid) < 0

    def test_no_intersection(self):
        sq = rectangle(0, 0, 1, 1)
        with pytest.raises(NoIntersection):
            split_polytope(sq, Hyperplane.from_normal_offset([1, 0], 2.0))

    def test_degenerate_cut_through_corner_region(self):
        sq = rectangle(0, 0, 1, 1)
        # grazing a vertex within tolerance: both sides cannot be proper
        with pytest.raises((DegenerateCut, NoIntersection)):
            split_polytope(sq, Hyperplane.from_normal_offset([1, 1], 1e-12))

    def test_splitting_conservation_random(self):
        rng = np.random.default_rng(12345)
        checked = 0
        while checked < 10_000:
            poly = random_convex_polygon(rng)
            n = rng.standard_normal(2)
            c = float(poly.centroid @ (n / np.linalg.norm(n))
                      + rng.uniform(-0.3, 0.3) * poly.diameter)
            h = Hyperplane.from_normal_offset(n, c)
            try:
                plus, minus, face = split_polytope(poly, h)
            except (NoIntersection, DegenerateCut):
                continue
            checked += 1
            assert abs(poly.area - plus.area - minus.area) <= 1e-9 * poly.area
            assert face.length > 0

    def test_split_pieces_cover_without_overlap(self):
        rng = np.random.default_rng(99)
        poly = random_convex_polygon(rng, n_points=12)
        h = Hyperplane.from_normal_offset([0.3, 1.0], float(poly.centroid @ [0.3, 1.0])
                                          / np.linalg.norm([0.3, 1.0]))
        plus, minus, _ = split_polytope(poly, h)
        for _ in range(200):
            p = poly.centroid + rng.uniform(-1, 1, 2) * poly.diameter
            inside = poly.contains_point(p, 1e-12)
            assert inside == (plus.contains_point(p, 1e-9) or minus.contains_point(p, 1e-9))


class TestWidth:
    def test_unit_square_widths(self):
        sq = rectangle(0, 0, 1, 1)
        assert width(sq, [1, 0]) == pytest.approx(1.0)
        assert width(sq, np.array([1, 1]) / SQRT2) == pytest.approx(SQRT2)
        assert width(rectangle(0, 0, 2, 1), [0, 1]) == pytest.approx(1.0)

    def test_width_symmetric(self):
        rng = np.random.default_rng(5)
        poly = random_convex_polygon(rng)
        for _ in range(50):
            u = rng.standard_normal(2)
            u /= np.linalg.norm(u)
            assert width(poly, u) == pytest.approx(width(poly, -u))

    def test_width_rotation_invariant(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            poly = random_convex_polygon(rng)
            u = rng.standard_normal(2)
            u /= np.linalg.norm(u)
            theta = rng.uniform(0, 2 * math.pi)
            R = np.array([[math.cos(theta), -math.sin(theta)],
                          [math.sin(theta), math.cos(theta)]])
            rotated = Polygon(poly.vertices @ R.T, validate=True)
            assert width(poly, u) == pytest.approx(width(rotated, R @ u), abs=1e-9)


class TestSegment:
    def test_midpoint_equidistant(self):
        s = Segment([0, 0], [2, 1])
        m = s.midpoint
        assert np.linalg.norm(m - s.a) == pytest.approx(np.linalg.norm(m - s.b))

    def test_point_on_interior(self):
        s = Segment([0.0, 0.0], [1.0, 0.0])
        assert point_on_segment_interior([0.5, 0.0], s, 1e-9)
        assert not point_on_segment_interior([1.0, 0.0], s, 1e-9)
        assert not point_on_segment_interior([0.5, 1e-6], s, 1e-9)

    def test_zero_length(self):
        s = Segment([1.0, 1.0], [1.0, 1.0])
        with pytest.raises(ZeroLength):
            point_on_segment_interior([1.0, 1.0], s, 1e-9)

    def test_clip_to_polygon(self):
        sq = rectangle(0, 0, 1, 1)
        clipped = Segment([-1.0, 0.5], [2.0, 0.5]).clip_to_polygon(sq)
        assert clipped.length == pytest.approx(1.0)
        assert Segment([2.0, 0.5], [3.0, 0.5]).clip_to_polygon(sq) is None


class TestPolyhedron:
    def test_cube_volume_centroid(self):
        c = box(0, 0, 0, 1, 1, 1)
        assert c.volume == pytest.approx(1.0)
        assert np.allclose(c.centroid, [0.5, 0.5, 0.5])
        assert c.diameter == pytest.approx(math.sqrt(3.0))

    def test_cube_axis_split(self):
        c = box(0, 0, 0, 1, 1, 1)
        plus, minus, face = split_polytope(c, Hyperplane.from_normal_offset([0, 0, 1], 0.5))
        assert plus.volume == pytest.approx(0.5)
        assert minus.volume == pytest.approx(0.5)
        assert face.measure == pytest.approx(1.0)

    def test_cube_oblique_splits_conserve_volume(self):
        rng = np.random.default_rng(21)
        c = box(0, 0, 0, 1, 2, 1.5)
        checked = 0
        while checked < 300:
            n = rng.standard_normal(3)
            h = Hyperplane.from_normal_offset(
                n, float(c.centroid @ (n / np.linalg.norm(n))
                         + rng.uniform(-0.3, 0.3) * c.diameter))
            try:
                plus, minus, face = split_polytope(c, h)
            except (NoIntersection, DegenerateCut):
                continue
            checked += 1
            assert abs(c.volume - plus.volume - minus.volume) <= 1e-9 * c.volume
            assert face.measure > 0

    def test_repeated_splits_stay_consistent(self):
        rng = np.random.default_rng(4)
        pieces = [box(0, 0, 0, 1, 1, 1)]
        for _ in range(40):
            target = pieces.pop(rng.integers(len(pieces)))
            n = rng.standard_normal(3)
            h = Hyperplane.from_normal_offset(
                n, float(target.centroid @ (n / np.linalg.norm(n))))
            try:
                plus, minus, _ = split_polytope(target, h)
            except (NoIntersection, DegenerateCut):
                pieces.append(target)
                continue
            pieces += [plus, minus]
        assert sum(p.volume for p in pieces) == pytest.approx(1.0, rel=1e-8)

    def test_cube_mean_width(self):
        assert box(0, 0, 0, 1, 1, 1).mean_width() == pytest.approx(1.5)

    def test_contains_point(self):
        c = box(0, 0, 0, 1, 1, 1)
        assert c.contains_point([0.5, 0.5, 0.5])
        assert not c.contains_point([1.5, 0.5, 0.5])

    def test_face3_clip_and_segment_intersection(self):
        c = box(0, 0, 0, 1, 1, 1)
        _, _, face = split_polytope(c, Hyperplane.from_normal_offset([0, 0, 1], 0.25))
        sub = box(0, 0, 0, 0.5, 0.5, 1)
        clipped = face.clip_to_polyhedron(sub)
        assert clipped.measure == pytest.approx(0.25)
        hit = face.segment_intersection(np.array([0.3, 0.3, 0.0]),
                                        np.array([0.3, 0.3, 1.0]), 1e-9)
        assert np.allclose(hit, [0.3, 0.3, 0.25])
        miss = face.segment_intersection(np.array([2.0, 2.0, 0.0]),
                                         np.array([2.0, 2.0, 1.0]), 1e-9)
        assert miss is None


class TestValidation:
    def test_polygon_needs_three_vertices(self):
        with pytest.raises(GeometryError):
            Polygon([[0, 0], [1, 0]])

    def test_rectangle_extents(self):
        with pytest.raises(GeometryError):
            rectangle(0, 0, 0, 1)

    def test_ccw_enforced(self):
        p = Polygon([[0, 0], [0, 1], [1, 1], [1, 0]], validate=True)
        assert p.area == pytest.approx(1.0)
