"""Build artifact: per-component polygons, dissections and topology graphs.

One occupancy grid yields one Workspace. Planning is only defined inside
a single free-space component; the workspace answers which component a
point belongs to and carries the serialized form written by the CLI.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .dissection import ConvexCell, Cutline, DissectionMap, decompose
from .geometry import Point
from .gridmap import IngestConfig, OccupancyGrid, SimplePolygon, component_polygons
from .topology import OutsideFreeSpaceError, TopologyGraph, build_graph, locate


@dataclass
class WorkspaceComponent:
    polygon: SimplePolygon
    dissection: DissectionMap
    graph: TopologyGraph


@dataclass
class Workspace:
    components: List[WorkspaceComponent]
    resolution: float
    epsilon_fit: float
    build_ms: Dict[str, float] = field(default_factory=dict)

    def locate_component(self, p: Point) -> Optional[Tuple[int, int]]:
        """(component index, cell id) containing p, or None."""
        for i, comp in enumerate(self.components):
            try:
                return i, locate(comp.dissection, p)
            except OutsideFreeSpaceError:
                continue
        return None

    def stats(self) -> Dict[str, int]:
        return {
            "components": len(self.components),
            "cells": sum(len(c.dissection.cells) for c in self.components),
            "cutlines": sum(len(c.dissection.cutlines) for c in self.components),
        }


def build_workspace(grid: OccupancyGrid, cfg: Optional[IngestConfig] = None) -> Workspace:
    cfg = cfg or IngestConfig()
    t0 = time.perf_counter()
    polygons = component_polygons(grid, cfg)
    t1 = time.perf_counter()
    comps = []
    for poly in polygons:
        dm = decompose(poly)
        comps.append(WorkspaceComponent(poly, dm, build_graph(dm)))
    t2 = time.perf_counter()
    return Workspace(comps, grid.resolution, cfg.epsilon_fit,
                     {"ingest": (t1 - t0) * 1e3, "dissect": (t2 - t1) * 1e3})


# ---------------------------------------------------------------------------
# JSON artifact
# ---------------------------------------------------------------------------

def workspace_to_json(ws: Workspace) -> str:
    doc = {
        "format": "topoplan-artifact-v1",
        "resolution": ws.resolution,
        "epsilon_fit": ws.epsilon_fit,
        "components": [
            {
                "polygon": {
                    "vertices": [list(v) for v in c.polygon.vertices],
                    "vertex_ids": c.polygon.vertex_ids,
                    "bridge_flags": [int(b) for b in c.polygon.bridge_flags],
                    "bridges": [list(b) for b in c.polygon.bridges],
                    "provenance": c.polygon.provenance,
                },
                "cells": [
                    {
                        "id": cell.id,
                        "vertices": [list(v) for v in cell.vertices],
                        "cutlines": cell.cutline_ids,
                        "centroid": list(cell.centroid),
                    }
                    for cell in c.dissection.cells
                ],
                "cutlines": [
                    {
                        "id": cl.id,
                        "a": list(cl.a),
                        "b": list(cl.b),
                        "left": cl.left_cell,
                        "right": cl.right_cell,
                        "bridge": int(cl.from_bridge),
                    }
                    for cl in c.dissection.cutlines
                ],
                "adjacency": {
                    str(n): c.graph.adjacency[n] for n in c.graph.nodes
                },
                "eps": c.dissection.eps,
                "bounds": list(c.dissection.bounds),
            }
            for c in ws.components
        ],
    }
    return json.dumps(doc, sort_keys=True)


def workspace_from_json(text: str) -> Workspace:
    doc = json.loads(text)
    if doc.get("format") != "topoplan-artifact-v1":
        raise ValueError("not a topoplan artifact")
    comps = []
    for cd in doc["components"]:
        pd = cd["polygon"]
        poly = SimplePolygon(
            [tuple(v) for v in pd["vertices"]],
            pd["provenance"],
            list(pd["vertex_ids"]),
            [bool(b) for b in pd["bridge_flags"]],
            [tuple(b) for b in pd["bridges"]],
        )
        cells = [
            ConvexCell(c["id"], [tuple(v) for v in c["vertices"]],
                       list(c["cutlines"]), tuple(c["centroid"]))
            for c in cd["cells"]
        ]
        cutlines = [
            Cutline(c["id"], tuple(c["a"]), tuple(c["b"]),
                    c["left"], c["right"], bool(c["bridge"]))
            for c in cd["cutlines"]
        ]
        dm = DissectionMap(cells, cutlines, poly.provenance,
                           cd["eps"], tuple(cd["bounds"]))
        comps.append(WorkspaceComponent(poly, dm, build_graph(dm)))
    return Workspace(comps, doc["resolution"], doc["epsilon_fit"])
