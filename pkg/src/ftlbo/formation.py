"""Formation geometry: centroid, offsets, rule checks and per-UAV paths.

Each UAV flies at a constant inertial-frame offset from the formation
centroid, so a planned centroid path fully determines every UAV's path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import LocalPoint


@dataclass(frozen=True)
class FormationSpec:
    uav_count: int
    offsets: np.ndarray  # (uav_count, 3), meters
    radius: float | None = None

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "offsets", offsets)
        if self.uav_count < 1 or offsets.shape[0] != self.uav_count:
            raise ValueError(
                f"expected {self.uav_count} offsets, got {offsets.shape[0]}"
            )
        if not np.all(np.isfinite(offsets)):
            raise ValueError("offsets must be finite")

    @classmethod
    def from_offsets(cls, offsets) -> "FormationSpec":
        arr = np.asarray(offsets, dtype=float).reshape(-1, 3)
        return cls(arr.shape[0], arr)


@dataclass(frozen=True)
class CentroidPath:
    start: LocalPoint
    waypoints: np.ndarray  # (m, 3)
    goal: LocalPoint

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "waypoints", wp)
        if not np.all(np.isfinite(wp)):
            raise ValueError("waypoints must be finite")

    @classmethod
    def from_vector(cls, start: LocalPoint, vector, goal: LocalPoint) -> "CentroidPath":
        return cls(start, np.asarray(vector, dtype=float).reshape(-1, 3), goal)

    def nodes(self) -> np.ndarray:
        """Full node sequence (start, W_1..W_m, goal) as an (m+2, 3) array."""
        return np.vstack([self.start.as_array(), self.waypoints, self.goal.as_array()])


@dataclass(frozen=True)
class UavPath:
    uav_index: int  # 1-based
    nodes: np.ndarray  # (m+2, 3)


@dataclass
class RuleReport:
    radius: float
    center_distances: np.ndarray  # d_n
    radius_errors: np.ndarray  # |d_n - r_F|
    neighbor_mismatch: np.ndarray  # | |P_n - P_prev| - |P_n - P_next| |
    tol: float

    @property
    def equal_radius_ok(self) -> bool:
        return bool(np.all(self.radius_errors <= self.tol))

    @property
    def equal_spacing_ok(self) -> bool:
        return bool(np.all(self.neighbor_mismatch <= self.tol))

    @property
    def passed(self) -> bool:
        return self.equal_radius_ok and self.equal_spacing_ok


def centroid(positions) -> LocalPoint:
    pts = np.asarray(
        [p.as_array() if isinstance(p, LocalPoint) else p for p in positions], dtype=float
    )
    if pts.size == 0:
        raise ValueError("centroid of an empty set")
    return LocalPoint.from_seq(pts.reshape(-1, 3).mean(axis=0))


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (up, side) spanning the plane orthogonal to ``normal``.

    ``up`` is the projection of +z onto the plane (or of +y when the plane is
    close to horizontal, where the +z projection would be mostly rounding
    error); ``side`` completes a right-handed pair with ``normal``.
    """
    n = normal / np.linalg.norm(normal)
    for ref in (np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0])):
        up = ref - np.dot(ref, n) * n
        if np.linalg.norm(up) > 0.1:
            break
    up = up / np.linalg.norm(up)
    side = np.cross(n, up)
    return up, side


def regular_offsets(uav_count: int, radius: float, plane_normal=(0.0, 1.0, 0.0)) -> FormationSpec:
    """Place ``uav_count`` UAVs evenly on a circle around the centroid.

    The first UAV sits at the top of the circle; the rest follow at equal
    angular steps. This is the regular-polygon solution of the equal-radius
    and equal-neighbour-spacing rules.
    """
    if uav_count < 2:
        raise ValueError("regular formation needs at least two UAVs")
    if not radius > 0:
        raise ValueError("radius must be positive")
    normal = np.asarray(plane_normal, dtype=float)
    if normal.shape != (3,) or not np.linalg.norm(normal) > 0:
        raise ValueError("plane normal must be a nonzero 3-vector")
    up, side = _plane_basis(normal)
    angles = math.pi / 2 + 2 * math.pi * np.arange(uav_count) / uav_count
    offsets = radius * (np.outer(np.sin(angles), up) + np.outer(np.cos(angles), side))
    return FormationSpec(uav_count, offsets, radius)


def check_formation_rules(spec: FormationSpec, tol: float = 1e-9) -> RuleReport:
    """Report how far ``spec`` is from equal-radius and equal-spacing rules.

    Without an explicit radius the mean centroid distance is used as r_F.
    UAVs are taken as a ring in list order to define adjacency.
    """
    offs = spec.offsets
    rel = offs - offs.mean(axis=0)
    d = np.linalg.norm(rel, axis=1)
    r = float(spec.radius) if spec.radius is not None else float(d.mean())
    if spec.uav_count >= 2:
        to_next = np.linalg.norm(offs - np.roll(offs, -1, axis=0), axis=1)
        to_prev = np.linalg.norm(offs - np.roll(offs, 1, axis=0), axis=1)
        mismatch = np.abs(to_next - to_prev)
    else:
        mismatch = np.zeros(1)
    return RuleReport(r, d, np.abs(d - r), mismatch, tol)


def derive_uav_paths(path: CentroidPath, spec: FormationSpec) -> list[UavPath]:
    nodes = path.nodes()
    return [UavPath(n + 1, nodes + spec.offsets[n]) for n in range(spec.uav_count)]
