import json

import numpy as np
import pytest

from topoplan import mapgen as mg
from topoplan import topology as tp
from topoplan.gridmap import IngestConfig, OccupancyGrid
from topoplan.workspace import build_workspace, workspace_from_json, workspace_to_json


@pytest.fixture(scope="module")
def ws():
    grid = mg.gen_cluttered(size=100, obstacles=4, seed=7)
    return build_workspace(grid, IngestConfig(epsilon_fit=1.0))


class TestWorkspace:
    def test_locate_component(self, ws):
        comp = ws.components[0]
        c = comp.dissection.cells[0].centroid
        assert ws.locate_component(c) == (0, 0)
        assert ws.locate_component((-5.0, -5.0)) is None

    def test_stats_counts(self, ws):
        stats = ws.stats()
        assert stats["components"] == len(ws.components)
        assert stats["cells"] == sum(len(c.dissection.cells) for c in ws.components)

    def test_multi_component_split(self):
        cells = np.zeros((20, 20), dtype=np.uint8)
        cells[:, 10] = 255
        grid = OccupancyGrid(20, 20, 1.0, cells)
        ws2 = build_workspace(grid, IngestConfig(epsilon_fit=1.0))
        assert len(ws2.components) == 2
        left = ws2.locate_component((3.0, 3.0))
        right = ws2.locate_component((15.0, 3.0))
        assert left is not None and right is not None
        assert left[0] != right[0]


class TestJsonRoundTrip:
    def test_round_trip_preserves_geometry(self, ws):
        text = workspace_to_json(ws)
        again = workspace_from_json(text)
        assert len(again.components) == len(ws.components)
        for a, b in zip(ws.components, again.components):
            assert a.polygon.vertices == b.polygon.vertices
            assert len(a.dissection.cells) == len(b.dissection.cells)
            assert len(a.dissection.cutlines) == len(b.dissection.cutlines)
            for ca, cb in zip(a.dissection.cutlines, b.dissection.cutlines):
                assert (ca.a, ca.b, ca.left_cell, ca.right_cell) == \
                    (cb.a, cb.b, cb.left_cell, cb.right_cell)

    def test_round_trip_is_stable_text(self, ws):
        text = workspace_to_json(ws)
        again = workspace_to_json(workspace_from_json(text))
        assert text == again

    def test_rejects_foreign_json(self):
        with pytest.raises(ValueError):
            workspace_from_json(json.dumps({"format": "something-else"}))

    def test_trace_works_after_round_trip(self, ws):
        text = workspace_to_json(ws)
        again = workspace_from_json(text)
        comp = again.components[0]
        c0 = comp.dissection.cells[0].centroid
        path = tp.trace(comp.dissection, [c0])
        assert path.nodes == (0,)
