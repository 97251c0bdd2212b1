import math
import random

import pytest

from topoplan import geometry as geo


class TestOrient:
    def test_ccw_turn(self):
        assert geo.orient((0, 0), (1, 0), (0, 1)) == 1

    def test_collinear(self):
        assert geo.orient((0, 0), (1, 1), (2, 2)) == 0

    def test_cw_turn(self):
        assert geo.orient((0, 0), (0, 1), (1, 0)) == -1

    def test_eps_band(self):
        assert geo.orient((0, 0), (1, 0), (2, 1e-12), eps=1e-9) == 0
        assert geo.orient((0, 0), (1, 0), (2, 1e-6), eps=1e-9) == 1

    def test_antisymmetric_and_translation_invariant(self):
        rng = random.Random(7)
        for _ in range(300):
            a, b, c = [(rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(3)]
            assert geo.orient(a, b, c) == -geo.orient(a, c, b)
            tx, ty = rng.uniform(-10, 10), rng.uniform(-10, 10)
            shifted = [(p[0] + tx, p[1] + ty) for p in (a, b, c)]
            # exact float translation can flip near-degenerate signs; use a band
            if abs(geo.cross(a, b, c)) > 1e-6:
                assert geo.orient(*shifted) == geo.orient(a, b, c)


class TestSegIntersect:
    def test_proper_diagonals(self):
        kind, pt = geo.seg_intersect((0, 0), (1, 1), (0, 1), (1, 0))
        assert kind == geo.PROPER
        assert pt == pytest.approx((0.5, 0.5))

    def test_parallel_disjoint(self):
        kind, pt = geo.seg_intersect((0, 0), (1, 0), (0, 1), (1, 1))
        assert kind == geo.NONE and pt is None

    def test_endpoint_touch(self):
        # oracle: enumerate orientation signs of the four endpoints
        p, q, r, s = (0, 0), (1, 0), (1, 0), (1, 1)
        signs = (geo.orient(p, q, r), geo.orient(p, q, s),
                 geo.orient(r, s, p), geo.orient(r, s, q))
        assert 0 in signs  # the touching configuration is degenerate
        kind, pt = geo.seg_intersect(p, q, r, s)
        assert kind == geo.TOUCH
        assert pt == (1, 0)

    def test_collinear_overlap_midpoint(self):
        kind, pt = geo.seg_intersect((0, 0), (4, 0), (2, 0), (6, 0))
        assert kind == geo.OVERLAP
        assert pt == pytest.approx((3.0, 0.0))

    def test_collinear_disjoint(self):
        kind, _ = geo.seg_intersect((0, 0), (1, 0), (2, 0), (3, 0))
        assert kind == geo.NONE

    def test_t_point_touch(self):
        kind, pt = geo.seg_intersect((0, 0), (2, 0), (1, -1), (1, 0))
        assert kind == geo.TOUCH
        assert pt == (1, 0)

    def test_symmetric_in_arguments(self):
        rng = random.Random(3)
        for _ in range(400):
            pts = [(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(4)]
            k1, _ = geo.seg_intersect(pts[0], pts[1], pts[2], pts[3])
            k2, _ = geo.seg_intersect(pts[2], pts[3], pts[0], pts[1])
            assert k1 == k2


class TestPolylineLength:
    def test_345_triangle(self):
        assert geo.polyline_length([(0, 0), (3, 4)]) == pytest.approx(5.0)

    def test_unit_square_perimeter(self):
        assert geo.polyline_length([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]) == pytest.approx(4.0)

    def test_single_point(self):
        assert geo.polyline_length([(7, 2)]) == 0.0

    def test_rigid_motion_invariance(self):
        rng = random.Random(11)
        for _ in range(50):
            pts = [(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(8)]
            base = geo.polyline_length(pts)
            ang = rng.uniform(0, 2 * math.pi)
            tx, ty = rng.uniform(-9, 9), rng.uniform(-9, 9)
            ca, sa = math.cos(ang), math.sin(ang)
            moved = [(ca * x - sa * y + tx, sa * x + ca * y + ty) for x, y in pts]
            assert geo.polyline_length(moved) == pytest.approx(base, rel=1e-9)

    def test_concatenation_additivity(self):
        rng = random.Random(13)
        for _ in range(50):
            f = [(rng.uniform(0, 5), rng.uniform(0, 5)) for _ in range(5)]
            g = [f[-1]] + [(rng.uniform(0, 5), rng.uniform(0, 5)) for _ in range(4)]
            assert geo.polyline_length(f) + geo.polyline_length(g) == \
                pytest.approx(geo.polyline_length(f + g[1:]), rel=1e-12)


SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


class TestPointInConvex:
    def test_interior(self):
        assert geo.point_in_convex(SQUARE, (0.5, 0.5)) == geo.INTERIOR

    def test_boundary(self):
        assert geo.point_in_convex(SQUARE, (1, 0.5), eps=1e-9) == geo.BOUNDARY

    def test_exterior(self):
        assert geo.point_in_convex(SQUARE, (2, 0)) == geo.EXTERIOR

    def test_rejects_nonconvex(self):
        lshape = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
        with pytest.raises(ValueError):
            geo.point_in_convex(lshape, (0.5, 0.5))


class TestMisc:
    def test_signed_area_ccw(self):
        assert geo.signed_area(SQUARE) == pytest.approx(1.0)
        assert geo.signed_area(SQUARE[::-1]) == pytest.approx(-1.0)

    def test_point_in_polygon_concave(self):
        lshape = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
        assert geo.point_in_polygon(lshape, (0.5, 0.5))
        assert geo.point_in_polygon(lshape, (0.5, 1.5))
        assert not geo.point_in_polygon(lshape, (1.5, 1.5))

    def test_project_point_segment(self):
        t, q, d = geo.project_point_segment((0, 1), (-1, 0), (1, 0))
        assert t == pytest.approx(0.5)
        assert q == pytest.approx((0.0, 0.0))
        assert d == pytest.approx(1.0)
