"""Mission-file export and post-planning geometric checks.

Waypoint files use the tab-separated ``QGC WPL 110`` text format understood by
common ground-control stations::

    QGC WPL 110
    <seq> <current> <frame> <command> <p1> <p2> <p3> <p4> <lat> <lon> <alt> <autocontinue>

All items use frame 3 (altitude relative to home) and command 16
(navigate to waypoint). Item 0 is the start location and carries
``current = 1``.
"""

from __future__ import annotations

import math

import numpy as np
from shapely.geometry import LineString, Point

from .formation import FormationSpec, UavPath
from .scenario import GeoPoint, LocalPoint, Scenario, ScenarioError, local_to_geo

WPL_HEADER = "QGC WPL 110"
FRAME_GLOBAL_RELATIVE_ALT = 3
CMD_NAV_WAYPOINT = 16
FORMATS = ("qgc-wpl-110",)


class PlanVerificationError(RuntimeError):
    pass


def export_waypoints(path: UavPath, origin: GeoPoint, format_tag: str = "qgc-wpl-110") -> str:
    if format_tag not in FORMATS:
        raise ValueError(f"unknown waypoint format {format_tag!r}")
    lines = [WPL_HEADER]
    for seq, (x, y, z) in enumerate(np.asarray(path.nodes, dtype=float)):
        try:
            geo = local_to_geo(origin, LocalPoint(float(x), float(y), float(z)))
        except ScenarioError as exc:
            raise ValueError(f"UAV {path.uav_index} node {seq}: {exc}") from None
        fields = [
            str(seq),
            "1" if seq == 0 else "0",
            str(FRAME_GLOBAL_RELATIVE_ALT),
            str(CMD_NAV_WAYPOINT),
            *("0.000000",) * 4,
            f"{geo.latitude:.10f}",
            f"{geo.longitude:.10f}",
            f"{z:.6f}",
            "1",
        ]
        lines.append("\t".join(fields))
    return "\n".join(lines) + "\n"


def parse_waypoints(text: str) -> list[tuple[int, float, float, float]]:
    """Return (seq, lat, lon, alt) for every item of a WPL file."""
    rows = text.strip().splitlines()
    if not rows or rows[0].strip() != WPL_HEADER:
        raise ValueError("missing QGC WPL 110 header")
    out = []
    for row in rows[1:]:
        f = row.split("\t")
        out.append((int(f[0]), float(f[8]), float(f[9]), float(f[10])))
    return out


def unsafe_segments(nodes: np.ndarray, scenario: Scenario) -> list[tuple[int, int]]:
    """(segment, obstacle) pairs whose horizontal clearance is <= the radius.

    Uses shapely geometry, independent of the optimizer's distance code.
    """
    bad = []
    xy = np.asarray(nodes, dtype=float)[:, :2]
    for j in range(len(xy) - 1):
        a, b = tuple(xy[j]), tuple(xy[j + 1])
        seg = LineString([a, b]) if a != b else Point(a)
        for k, obs in enumerate(scenario.obstacles):
            if seg.distance(Point(obs.center.x, obs.center.y)) <= obs.radius:
                bad.append((j, k))
    return bad


def verify_plan(
    scenario: Scenario,
    centroid_nodes: np.ndarray,
    uav_paths: list[UavPath],
    formation: FormationSpec,
    total_cost: float,
    strict_uav_safety: bool = False,
    task_cost: float | None = None,
) -> None:
    """Re-check an emitted plan before anything is written to disk."""
    centroid_nodes = np.asarray(centroid_nodes, dtype=float)
    for p in uav_paths:
        expect = centroid_nodes + formation.offsets[p.uav_index - 1]
        if p.nodes.shape != centroid_nodes.shape or not np.array_equal(p.nodes, expect):
            raise PlanVerificationError(f"UAV {p.uav_index} path is not the centroid path plus its offset")
    if math.isfinite(total_cost):
        paths = [centroid_nodes] + ([p.nodes for p in uav_paths] if strict_uav_safety else [])
        for nodes in paths:
            bad = unsafe_segments(nodes, scenario)
            if bad:
                j, k = bad[0]
                raise PlanVerificationError(f"segment {j} intersects obstacle {k} despite finite cost")
    if task_cost == 0:
        for p in uav_paths:
            z = p.nodes[:, 2]
            if np.any(z < scenario.h_min) or np.any(z > scenario.h_max):
                raise PlanVerificationError(f"UAV {p.uav_index} leaves the altitude band despite zero task cost")
