import math
import random

import pytest

from topoplan import gridmap as gm


def star_polygon(rng: random.Random, n_vertices: int, cx=0.0, cy=0.0,
                 r_min=1.0, r_max=4.0, ccw=True):
    """Random simple polygon, star-shaped around (cx, cy).

    Angles are strictly increasing with a guaranteed gap so the ring can
    never fold over itself, whatever the radii do.
    """
    step = 2 * math.pi / n_vertices
    angles = [(i + 0.05 + 0.9 * rng.random()) * step for i in range(n_vertices)]
    pts = []
    for a in angles:
        r = rng.uniform(r_min, r_max)
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    if not ccw:
        pts.reverse()
    return pts


def random_polygon_with_holes(seed: int, max_outer=40, max_holes=3):
    """Keyholed weakly simple polygon: star outer, star holes, bridges."""
    rng = random.Random(seed)
    n = rng.randint(5, max_outer)
    outer_pts = star_polygon(rng, n, r_min=6.0, r_max=12.0)
    outer = gm.BoundaryLoop(outer_pts + [outer_pts[0]], "outer")

    holes = []
    n_holes = rng.randint(0, max_holes)
    attempts = 0
    while len(holes) < n_holes and attempts < 60:
        attempts += 1
        hx = rng.uniform(-3.0, 3.0)
        hy = rng.uniform(-3.0, 3.0)
        hr = rng.uniform(0.4, 1.4)
        m = rng.randint(3, 8)
        hole_pts = star_polygon(rng, m, cx=hx, cy=hy, r_min=0.5 * hr, r_max=hr, ccw=False)
        if any(math.hypot(px - hx, py - hy) > 5.0 for px, py in hole_pts):
            continue
        clear = True
        for ex_pts in [h.points[:-1] for h in holes]:
            ex_cx = sum(p[0] for p in ex_pts) / len(ex_pts)
            ex_cy = sum(p[1] for p in ex_pts) / len(ex_pts)
            if math.hypot(ex_cx - hx, ex_cy - hy) < 3.2:
                clear = False
        if clear:
            holes.append(gm.BoundaryLoop(hole_pts + [hole_pts[0]], "hole"))
    try:
        return gm.merge_holes(outer, holes)
    except RuntimeError:
        return gm.merge_holes(outer, [])


@pytest.fixture
def rng():
    return random.Random(20240917)
