"""Deterministic occupancy-grid generators for the benchmark corpus.

Five archetypes: cluttered (random rectangles), trap (decoy hall feeding
a long serpentine corridor), maze (recursive division, simply connected),
maze-with-loops, and floorplan (rooms and doors). All generators are
pure functions of their seed.
"""

from __future__ import annotations

import math
import random
from typing import Dict, List, Optional, Tuple

import numpy as np

from .gridmap import OccupancyGrid

FREE = 0
OCCUPIED = 255

ARCHETYPES = ("cluttered", "trap", "maze", "maze-loops", "floorplan")


def _grid(width: int, height: int, resolution: float = 1.0) -> np.ndarray:
    return np.zeros((height, width), dtype=np.uint8)


def _to_grid(cells: np.ndarray, resolution: float = 1.0) -> OccupancyGrid:
    h, w = cells.shape
    return OccupancyGrid(w, h, resolution, cells, occ_threshold=128)


def gen_cluttered(size: int = 200, obstacles: int = 12, seed: int = 0,
                  resolution: float = 1.0, min_side: int = 8,
                  max_side: int = 40) -> OccupancyGrid:
    """Random axis-aligned rectangles, pairwise separated and off the border
    so each one is a genuine hole of a single free component."""
    rng = random.Random(seed)
    cells = _grid(size, size)
    placed: List[Tuple[int, int, int, int]] = []
    attempts = 0
    while len(placed) < obstacles and attempts < 4000:
        attempts += 1
        w = rng.randint(min_side, max_side)
        h = rng.randint(min_side, max_side)
        x = rng.randint(3, size - w - 3)
        y = rng.randint(3, size - h - 3)
        box = (x - 2, y - 2, x + w + 2, y + h + 2)  # rectangle plus clearance
        if any(not (box[2] <= px0 or px1 <= box[0] or box[3] <= py0 or py1 <= box[1])
               for px0, py0, px1, py1 in placed):
            continue
        placed.append(box)
        cells[y:y + h, x:x + w] = OCCUPIED
    return _to_grid(cells, resolution)


def gen_trap(seed: int = 0, legs: int = 36, leg_len: int = 110,
             pillar_pitch: int = 12, resolution: float = 1.0) -> OccupancyGrid:
    """Pillar hall (start side) feeding one long serpentine corridor.

    The hall supplies hundreds of decoy cutlines while the corridor must
    be discovered one cutline at a time, which is what starves samplers
    that lack the visit-every-cutline-once boost.
    """
    rng = random.Random(seed)
    wall = 1
    cw = 3  # corridor width
    height = legs * (cw + wall) + wall + 2
    hall_w = leg_len + 2
    width = hall_w + leg_len + 4
    cells = _grid(width, height)
    # border
    cells[0, :] = OCCUPIED
    cells[-1, :] = OCCUPIED
    cells[:, 0] = OCCUPIED
    cells[:, -1] = OCCUPIED
    # dividing wall between hall and snake, with the entrance at the bottom
    div_x = hall_w
    cells[:, div_x] = OCCUPIED
    cells[height - 1 - cw - 1:height - 1, div_x] = FREE

    # serpentine: horizontal walls across the snake area with alternating gaps
    x0, x1 = div_x + 1, width - 1
    for i in range(1, legs):
        y = height - 1 - i * (cw + wall)
        cells[y, x0:x1] = OCCUPIED
        if i % 2 == 1:
            cells[y, x0:x0 + cw] = FREE
        else:
            cells[y, x1 - cw:x1] = FREE

    # pillar hall
    for py in range(pillar_pitch, height - pillar_pitch, pillar_pitch):
        for px in range(pillar_pitch, hall_w - 2, pillar_pitch):
            jx = rng.randint(-2, 2)
            jy = rng.randint(-2, 2)
            x, y = px + jx, py + jy
            if 2 <= x < hall_w - 4 and 2 <= y < height - 4:
                cells[y:y + 2, x:x + 2] = OCCUPIED
    return _to_grid(cells, resolution)


def trap_endpoints(grid: OccupancyGrid) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Canonical task for the trap: hall corner to the snake's far end."""
    res = grid.resolution
    start = (6.5 * res, 6.5 * res)
    goal = ((grid.width - 3.0) * res, 3.5 * res)
    return start, goal


def gen_maze(cells_x: int = 12, cells_y: int = 12, cell: int = 6, seed: int = 0,
             extra_openings: int = 0, resolution: float = 1.0) -> OccupancyGrid:
    """Recursive-division maze; simply connected unless openings are added."""
    rng = random.Random(seed)
    width = cells_x * cell + 1
    height = cells_y * cell + 1
    grid = _grid(width, height)
    grid[0, :] = OCCUPIED
    grid[-1, :] = OCCUPIED
    grid[:, 0] = OCCUPIED
    grid[:, -1] = OCCUPIED

    def divide(x0, y0, x1, y1):
        # region of whole maze cells [x0,x1) x [y0,y1)
        if x1 - x0 < 2 and y1 - y0 < 2:
            return
        horizontal = (y1 - y0) > (x1 - x0) or ((y1 - y0) == (x1 - x0) and rng.random() < 0.5)
        if horizontal and y1 - y0 >= 2:
            wy = rng.randint(y0 + 1, y1 - 1) * cell
            gap = rng.randint(x0, x1 - 1)
            for gx in range(x0 * cell, x1 * cell + 1):
                grid[wy, gx] = OCCUPIED
            gx0 = gap * cell + 1
            grid[wy, gx0:gx0 + cell - 1] = FREE
            divide(x0, y0, x1, wy // cell)
            divide(x0, wy // cell, x1, y1)
        elif x1 - x0 >= 2:
            wx = rng.randint(x0 + 1, x1 - 1) * cell
            gap = rng.randint(y0, y1 - 1)
            for gy in range(y0 * cell, y1 * cell + 1):
                grid[gy, wx] = OCCUPIED
            gy0 = gap * cell + 1
            grid[gy0:gy0 + cell - 1, wx] = FREE
            divide(x0, y0, wx // cell, y1)
            divide(wx // cell, y0, x1, y1)

    divide(0, 0, cells_x, cells_y)

    if extra_openings:
        _knock_openings(grid, rng, extra_openings, cell)
    return _to_grid(grid, resolution)


def _knock_openings(grid: np.ndarray, rng: random.Random, count: int, cell: int):
    """Open interior wall segments flanked by free cells (adds one loop each)."""
    h, w = grid.shape
    done = 0
    for _ in range(4000):
        if done >= count:
            break
        x = rng.randint(2, w - 3)
        y = rng.randint(2, h - 3)
        if grid[y, x] != OCCUPIED:
            continue
        if grid[y, x - 1] == FREE and grid[y, x + 1] == FREE and \
                grid[y - 1, x] == OCCUPIED and grid[y + 1, x] == OCCUPIED:
            y0 = max(1, y - cell // 2)
            y1 = min(h - 2, y + cell // 2)
            if all(grid[yy, x - 1] == FREE and grid[yy, x + 1] == FREE
                   for yy in range(y0, y1 + 1)):
                grid[y0:y1 + 1, x] = FREE
                done += 1
        elif grid[y - 1, x] == FREE and grid[y + 1, x] == FREE and \
                grid[y, x - 1] == OCCUPIED and grid[y, x + 1] == OCCUPIED:
            x0 = max(1, x - cell // 2)
            x1 = min(w - 2, x + cell // 2)
            if all(grid[y - 1, xx] == FREE and grid[y + 1, xx] == FREE
                   for xx in range(x0, x1 + 1)):
                grid[y, x0:x1 + 1] = FREE
                done += 1


def gen_floorplan(rooms_x: int = 3, rooms_y: int = 3, room: int = 24,
                  door: int = 4, seed: int = 0,
                  resolution: float = 1.0) -> OccupancyGrid:
    """Rooms separated by unit walls; every shared wall gets one door."""
    rng = random.Random(seed)
    width = rooms_x * room + 1
    height = rooms_y * room + 1
    grid = _grid(width, height)
    grid[0, :] = OCCUPIED
    grid[-1, :] = OCCUPIED
    grid[:, 0] = OCCUPIED
    grid[:, -1] = OCCUPIED

    for i in range(1, rooms_x):
        grid[:, i * room] = OCCUPIED
    for j in range(1, rooms_y):
        grid[j * room, :] = OCCUPIED

    for i in range(1, rooms_x):  # doors through vertical walls
        for j in range(rooms_y):
            y0 = j * room + 1 + rng.randint(0, room - door - 2)
            grid[y0:y0 + door, i * room] = FREE
    for j in range(1, rooms_y):  # doors through horizontal walls
        for i in range(rooms_x):
            x0 = i * room + 1 + rng.randint(0, room - door - 2)
            grid[j * room, x0:x0 + door] = FREE
    return _to_grid(grid, resolution)


def generate(archetype: str, seed: int = 0, **kwargs) -> OccupancyGrid:
    if archetype == "cluttered":
        return gen_cluttered(seed=seed, **kwargs)
    if archetype == "trap":
        return gen_trap(seed=seed, **kwargs)
    if archetype == "maze":
        return gen_maze(seed=seed, **kwargs)
    if archetype == "maze-loops":
        kwargs.setdefault("extra_openings", 6)
        return gen_maze(seed=seed, **kwargs)
    if archetype == "floorplan":
        return gen_floorplan(seed=seed, **kwargs)
    raise ValueError(f"unknown archetype: {archetype!r} (expected one of {ARCHETYPES})")
