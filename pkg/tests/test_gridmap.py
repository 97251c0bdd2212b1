import math

import numpy as np
import pytest

from topoplan import gridmap as gm
from topoplan.geometry import PROPER, seg_intersect, seg_point_distance, signed_area


def make_grid(rows, occ_threshold=128, resolution=1.0):
    """rows: list of strings, '#' occupied, '.' free."""
    h = len(rows)
    w = len(rows[0])
    cells = np.zeros((h, w), dtype=np.uint8)
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            cells[r, c] = 255 if ch == "#" else 0
    return gm.OccupancyGrid(w, h, resolution, cells, occ_threshold)


class TestLoadGrid:
    def test_p2_all_free(self):
        data = b"P2\n4 4\n255\n" + b" ".join(b"0" for _ in range(16))
        grid = gm.load_grid(data)
        assert grid.free_cell_count() == 16

    def test_p5_single_occupied(self):
        payload = bytearray(16)
        payload[5] = 255
        data = b"P5\n4 4\n255\n" + bytes(payload)
        grid = gm.load_grid(data)
        assert grid.free_cell_count() == 15
        assert not grid.free_mask[1, 1]

    def test_truncated_payload(self):
        data = b"P5\n4 4\n255\n" + bytes(7)
        with pytest.raises(gm.GridFormatError, match="short read"):
            gm.load_grid(data)

    def test_comments_in_header(self):
        data = b"P2\n# made by hand\n2 2\n255\n0 0 0 0"
        grid = gm.load_grid(data)
        assert grid.width == 2 and grid.height == 2

    def test_bad_magic(self):
        with pytest.raises(gm.GridFormatError):
            gm.load_grid(b"P6\n1 1\n255\n\x00")

    def test_pgm_round_trip(self):
        grid = make_grid(["..#", "...", "#.."])
        again = gm.load_grid(gm.dump_pgm(grid))
        assert np.array_equal(grid.cells, again.cells)


class TestExtractComponents:
    def test_all_free(self):
        comps = gm.extract_components(make_grid(["." * 10] * 10))
        assert len(comps) == 1
        assert comps[0].outer.kind == "outer"
        assert comps[0].holes == []
        assert comps[0].free_cells == 100

    def test_center_block_makes_hole(self):
        rows = ["." * 10 for _ in range(10)]
        rows[4] = "....##...."
        rows[5] = "....##...."
        comps = gm.extract_components(make_grid(rows))
        assert len(comps) == 1
        assert len(comps[0].holes) == 1
        assert comps[0].holes[0].signed_area() < 0
        assert comps[0].outer.signed_area() > 0

    def test_full_column_splits(self):
        rows = ["...#..." for _ in range(5)]
        comps = gm.extract_components(make_grid(rows))
        assert len(comps) == 2

    def test_zero_free_cells(self):
        assert gm.extract_components(make_grid(["##", "##"])) == []

    def test_outer_loop_area_equals_free_cells_when_solid(self):
        comps = gm.extract_components(make_grid(["...", "...", "..."]))
        assert comps[0].outer.signed_area() == pytest.approx(9.0)

    def test_diagonal_free_cells_are_separate_components(self):
        comps = gm.extract_components(make_grid([".#", "#."]))
        assert len(comps) == 2

    def test_resolution_scales_coordinates(self):
        comps = gm.extract_components(make_grid(["..", ".."], resolution=0.5))
        xs = [p[0] for p in comps[0].outer.points]
        assert max(xs) == pytest.approx(1.0)


def staircase_loop():
    pts = [(0, 0)]
    x, y = 0, 0
    for _ in range(5):
        x += 1
        pts.append((x, y))
        y += 1
        pts.append((x, y))
    pts += [(0, 5)]
    pts += [(0, 0)]
    return gm.BoundaryLoop([(float(a), float(b)) for a, b in pts], "outer")


class TestSimplifyLoop:
    def test_rectangle_from_unit_steps(self):
        pts = []
        for x in range(100):
            pts.append((float(x), 0.0))
        for y in range(100):
            pts.append((100.0, float(y)))
        for x in range(100, 0, -1):
            pts.append((float(x), 100.0))
        for y in range(100, 0, -1):
            pts.append((0.0, float(y)))
        pts.append((0.0, 0.0))
        assert len(pts) == 401
        loop = gm.BoundaryLoop(pts, "outer")
        out = gm.simplify_loop(loop, 2.0)
        assert len(out.points) - 1 == 4

    def test_small_epsilon_keeps_staircase(self):
        loop = staircase_loop()
        out = gm.simplify_loop(loop, 0.01)
        assert len(out.points) == len(loop.points)

    def test_deviation_bound_holds(self):
        loop = staircase_loop()
        for eps in (0.4, 0.8, 8.0):
            out = gm.simplify_loop(loop, eps)
            spts = out.points
            for p in loop.points[:-1]:
                d = min(seg_point_distance(spts[i], spts[i + 1], p)
                        for i in range(len(spts) - 1))
                assert d <= eps + 1e-9

    def test_degenerate_loop_rejected(self):
        loop = gm.BoundaryLoop([(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)], "outer")
        with pytest.raises(ValueError):
            gm.simplify_loop(loop, 1.0)

    def test_conservative_split_keeps_polygon_off_obstacles(self):
        # bumpy wall: aggressive epsilon would cut across the bump
        rows = [
            "........",
            "........",
            "...##...",
            "...##...",
            "........",
            "........",
        ]
        grid = make_grid(rows)
        comp = gm.extract_components(grid)[0]
        out = gm.simplify_loop(comp.holes[0], 10.0, grid)
        # hole loop must still enclose the 2x2 block
        assert abs(out.signed_area()) >= 4.0 - 1e-9


SQ_OUTER = gm.BoundaryLoop([(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0), (0.0, 0.0)], "outer")
SQ_HOLE = gm.BoundaryLoop([(1.0, 1.0), (1.0, 3.0), (3.0, 3.0), (3.0, 1.0), (1.0, 1.0)], "hole")


class TestMergeHoles:
    def test_no_holes_identity(self):
        poly = gm.merge_holes(SQ_OUTER, [])
        assert poly.vertices == SQ_OUTER.points[:-1]
        assert poly.bridges == []

    def test_square_hole_gives_ten_vertices(self):
        poly = gm.merge_holes(SQ_OUTER, [SQ_HOLE])
        assert len(poly.vertices) == 10
        assert len(poly.bridges) == 1
        # interior area = outer - hole
        assert poly.area() == pytest.approx(16.0 - 4.0)
        # bridge duplicates share ids
        ids = poly.vertex_ids
        assert len(set(ids)) == 8

    def test_two_holes_result_simple(self):
        outer = gm.BoundaryLoop(
            [(0.0, 0.0), (10.0, 0.0), (10.0, 6.0), (0.0, 6.0), (0.0, 0.0)], "outer")
        h1 = gm.BoundaryLoop(
            [(2.0, 2.0), (2.0, 4.0), (4.0, 4.0), (4.0, 2.0), (2.0, 2.0)], "hole")
        h2 = gm.BoundaryLoop(
            [(6.0, 2.0), (6.0, 4.0), (8.0, 4.0), (8.0, 2.0), (6.0, 2.0)], "hole")
        poly = gm.merge_holes(outer, [h1, h2])
        assert len(poly.bridges) == 2
        assert poly.area() == pytest.approx(60.0 - 8.0)
        # pairwise edge check: no proper crossings anywhere
        v = poly.vertices
        n = len(v)
        for i in range(n):
            for j in range(i + 1, n):
                kind, _ = seg_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])
                assert kind != PROPER

    def test_bridge_flags_mark_four_occurrences(self):
        poly = gm.merge_holes(SQ_OUTER, [SQ_HOLE])
        assert sum(poly.bridge_flags) == 4


class TestComponentPolygons:
    def test_area_conservation_band(self):
        rows = ["." * 20 for _ in range(20)]
        rows[8] = "....######.........."
        rows[9] = "....######.........."
        rows[10] = "....######.........."
        grid = make_grid(rows)
        eps_fit = 1.5
        polys = gm.component_polygons(grid, gm.IngestConfig(epsilon_fit=eps_fit))
        assert len(polys) == 1
        poly = polys[0]
        free = grid.free_cell_count() * grid.resolution ** 2
        peri = sum(math.dist(poly.vertices[i - 1], poly.vertices[i])
                   for i in range(len(poly.vertices)))
        assert abs(poly.area() - free) <= peri * eps_fit

    def test_loops_per_component(self):
        rows = ["." * 12 for _ in range(12)]
        rows[3] = "..##...##..."[:12]
        rows[4] = "..##...##..."[:12]
        grid = make_grid(rows)
        comps = gm.extract_components(grid)
        assert len(comps) == 1
        assert len(comps[0].holes) == 2

    def test_hole_representatives(self):
        rows = ["." * 12 for _ in range(12)]
        rows[3] = "..##...##..."[:12]
        rows[4] = "..##...##..."[:12]
        grid = make_grid(rows)
        reps = gm.hole_representatives(grid)
        assert len(reps) == 2
