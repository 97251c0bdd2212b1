"""Convex-dissection topology toolkit.

Dissect 2D free space into convex cells joined by cutlines, encode path
homotopy classes as reduced cell sequences, solve for the shortest path
inside a class with an elastic-band sweep, and search classes with a
cutline-sampling tree planner.
"""

from .dissection import ConvexCell, Cutline, DissectionMap, decompose
from .geometry import Point
from .gridmap import (
    BoundaryLoop,
    IngestConfig,
    OccupancyGrid,
    SimplePolygon,
    component_polygons,
    load_grid,
    merge_holes,
)
from .planner import PlanResult, SamplerParams, Task, UnreachableError, plan, reduce_branches
from .shortest import SolverConfig, project_on_cutline, shortest_in_class
from .topology import (
    OutsideFreeSpaceError,
    TopoPath,
    TopologyGraph,
    build_graph,
    concat,
    format_code,
    homotopic,
    invert,
    locate,
    parse_code,
    realize,
    reduce_path,
    trace,
)
from .workspace import Workspace, build_workspace, workspace_from_json, workspace_to_json

__version__ = "0.1.0"

__all__ = [
    "BoundaryLoop",
    "ConvexCell",
    "Cutline",
    "DissectionMap",
    "IngestConfig",
    "OccupancyGrid",
    "OutsideFreeSpaceError",
    "PlanResult",
    "Point",
    "SamplerParams",
    "SimplePolygon",
    "SolverConfig",
    "Task",
    "TopoPath",
    "TopologyGraph",
    "UnreachableError",
    "Workspace",
    "build_graph",
    "build_workspace",
    "component_polygons",
    "concat",
    "decompose",
    "format_code",
    "homotopic",
    "invert",
    "load_grid",
    "locate",
    "merge_holes",
    "parse_code",
    "plan",
    "project_on_cutline",
    "realize",
    "reduce_branches",
    "reduce_path",
    "shortest_in_class",
    "trace",
    "workspace_from_json",
    "workspace_to_json",
]
