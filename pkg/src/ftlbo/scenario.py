"""Planning problem definition: working volume, obstacles, endpoints, costs.

Scenarios are read from a YAML document. Coordinates may be given either
geodetic (lat/lon in degrees, altitude in meters above ground) or directly in
the local metric frame (x east, y north, z up). Geodetic input is projected
onto a local tangent plane anchored at the south-west corner of the working
area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

EARTH_RADIUS = 6_371_000.0
# Largest lat/lon separation (degrees) accepted by the flat-earth projection.
MAX_PROJECTION_SPAN_DEG = 1.0


class ScenarioError(ValueError):
    """Invalid scenario input. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not (math.isfinite(self.latitude) and -90.0 <= self.latitude <= 90.0):
            raise ScenarioError("latitude", f"{self.latitude} outside [-90, 90]")
        if not (math.isfinite(self.longitude) and -180.0 <= self.longitude <= 180.0):
            raise ScenarioError("longitude", f"{self.longitude} outside [-180, 180]")


@dataclass(frozen=True)
class LocalPoint:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ScenarioError("point", f"non-finite coordinate in {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_seq(cls, seq) -> "LocalPoint":
        x, y, z = (float(v) for v in seq)
        return cls(x, y, z)


@dataclass(frozen=True)
class Obstacle:
    """Vertical cylinder of unbounded height; ``center.z`` is ignored."""

    center: LocalPoint
    radius: float


@dataclass(frozen=True)
class Weights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class Scenario:
    lower_bound: LocalPoint
    upper_bound: LocalPoint
    start: LocalPoint
    goal: LocalPoint
    obstacles: tuple[Obstacle, ...]
    h_min: float
    h_max: float
    weights: Weights = field(default_factory=Weights)
    waypoint_count: int = 10
    origin: GeoPoint | None = None

    def __post_init__(self):
        validate_scenario(self)

    @property
    def lower(self) -> np.ndarray:
        return self.lower_bound.as_array()

    @property
    def upper(self) -> np.ndarray:
        return self.upper_bound.as_array()

    @property
    def dimension(self) -> int:
        return 3 * self.waypoint_count

    def obstacle_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Obstacle centers as a (K, 2) array and radii as (K,)."""
        centers = np.array([[o.center.x, o.center.y] for o in self.obstacles], dtype=float)
        radii = np.array([o.radius for o in self.obstacles], dtype=float)
        return centers.reshape(-1, 2), radii


def geo_to_local(origin: GeoPoint, p: GeoPoint) -> LocalPoint:
    """Equirectangular projection of ``p`` around ``origin`` (z = 0)."""
    dlat = p.latitude - origin.latitude
    dlon = p.longitude - origin.longitude
    if abs(dlat) > MAX_PROJECTION_SPAN_DEG or abs(dlon) > MAX_PROJECTION_SPAN_DEG:
        raise ScenarioError(
            "coordinates",
            f"{p} is too far from origin {origin} for a local-plane projection",
        )
    coslat = math.cos(math.radians(origin.latitude))
    return LocalPoint(
        EARTH_RADIUS * math.radians(dlon) * coslat,
        EARTH_RADIUS * math.radians(dlat),
        0.0,
    )


def local_to_geo(origin: GeoPoint, p: LocalPoint) -> GeoPoint:
    """Inverse of :func:`geo_to_local` (altitude is dropped)."""
    coslat = math.cos(math.radians(origin.latitude))
    lat = origin.latitude + math.degrees(p.y / EARTH_RADIUS)
    lon = origin.longitude + math.degrees(p.x / (EARTH_RADIUS * coslat))
    return GeoPoint(lat, lon)


def validate_point_in_bounds(s: Scenario, p: LocalPoint) -> bool:
    v = p.as_array()
    return bool(np.all(v >= s.lower) and np.all(v <= s.upper))


def _inside_xy(s: Scenario, p: LocalPoint) -> bool:
    lo, hi = s.lower_bound, s.upper_bound
    return lo.x <= p.x <= hi.x and lo.y <= p.y <= hi.y


def validate_scenario(s: Scenario) -> None:
    lo, hi = s.lower, s.upper
    if not np.all(lo < hi):
        raise ScenarioError("bounds", "lower bound must be below upper bound on every axis")
    if not (math.isfinite(s.h_min) and math.isfinite(s.h_max)):
        raise ScenarioError("h_min", "altitude limits must be finite")
    if s.h_min <= 0:
        raise ScenarioError("h_min", "h_min must be positive")
    if s.h_min >= s.h_max:
        raise ScenarioError("h_max", "altitude band empty")
    if s.start == s.goal:
        raise ScenarioError("goal", "start and goal coincide")
    if not validate_point_in_bounds(s, s.start):
        raise ScenarioError("start", "outside bounds")
    if not validate_point_in_bounds(s, s.goal):
        raise ScenarioError("goal", "outside bounds")
    w = s.weights.as_tuple()
    if any(not math.isfinite(v) or v < 0 for v in w):
        raise ScenarioError("weights", "weights must be finite and nonnegative")
    if all(v == 0 for v in w):
        raise ScenarioError("weights", "weights all zero")
    if isinstance(s.waypoint_count, bool) or not isinstance(s.waypoint_count, int) or s.waypoint_count < 1:
        raise ScenarioError("waypoint_count", "must be a positive integer")
    for k, obs in enumerate(s.obstacles):
        if not (math.isfinite(obs.radius) and obs.radius > 0):
            raise ScenarioError(f"obstacles[{k}].radius", "nonpositive radius")
        if not _inside_xy(s, obs.center):
            raise ScenarioError(f"obstacles[{k}].center", "outside working area")


# ---------------------------------------------------------------------------
# config parsing


def _require(mapping: dict, key: str, where: str) -> Any:
    if not isinstance(mapping, dict) or key not in mapping:
        raise ScenarioError(f"{where}{key}", "missing")
    return mapping[key]


def _number(value, name: str) -> float:
    if isinstance(value, bool):
        raise ScenarioError(name, "expected a number")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(name, f"expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ScenarioError(name, "must be finite")
    return out


def _geo(entry, name: str) -> GeoPoint:
    if not isinstance(entry, dict):
        raise ScenarioError(name, "expected a mapping with lat/lon")
    return GeoPoint(
        _number(_require(entry, "lat", name + "."), name + ".lat"),
        _number(_require(entry, "lon", name + "."), name + ".lon"),
    )


def _xyz(entry, name: str) -> LocalPoint:
    if not isinstance(entry, (list, tuple)) or len(entry) != 3:
        raise ScenarioError(name, "expected [x, y, z]")
    return LocalPoint(*(_number(v, f"{name}[{i}]") for i, v in enumerate(entry)))


def _xy(entry, name: str) -> LocalPoint:
    if not isinstance(entry, (list, tuple)) or len(entry) != 2:
        raise ScenarioError(name, "expected [x, y]")
    return LocalPoint(*(_number(v, f"{name}[{i}]") for i, v in enumerate(entry)))


def parse_config(config_text: str) -> dict:
    try:
        doc = yaml.safe_load(config_text)
    except yaml.YAMLError as exc:
        raise ScenarioError("config", f"parse failure: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("config", "top level must be a mapping")
    return doc


def scenario_from_dict(doc: dict) -> Scenario:
    frame = doc.get("frame", "local")
    if frame not in ("local", "geodetic"):
        raise ScenarioError("frame", f"unknown frame {frame!r}")
    bounds = _require(doc, "bounds", "")
    z_lo = _number(_require(bounds, "z_min", "bounds."), "bounds.z_min")
    z_hi = _number(_require(bounds, "z_max", "bounds."), "bounds.z_max")

    if frame == "geodetic":
        a = _geo(_require(bounds, "corner_a", "bounds."), "bounds.corner_a")
        b = _geo(_require(bounds, "corner_b", "bounds."), "bounds.corner_b")
        origin = GeoPoint(min(a.latitude, b.latitude), min(a.longitude, b.longitude))
        far = geo_to_local(origin, GeoPoint(max(a.latitude, b.latitude), max(a.longitude, b.longitude)))
        lower = LocalPoint(0.0, 0.0, z_lo)
        upper = LocalPoint(far.x, far.y, z_hi)

        def point(entry, name):
            g = geo_to_local(origin, _geo(entry, name))
            return LocalPoint(g.x, g.y, _number(_require(entry, "alt", name + "."), name + ".alt"))

        def obstacle_center(entry, name):
            return geo_to_local(origin, _geo(entry, name))
    else:
        lo = _xy(_require(bounds, "lower", "bounds."), "bounds.lower")
        hi = _xy(_require(bounds, "upper", "bounds."), "bounds.upper")
        lower = LocalPoint(lo.x, lo.y, z_lo)
        upper = LocalPoint(hi.x, hi.y, z_hi)
        origin = _geo(doc["origin"], "origin") if "origin" in doc else None
        point = _xyz

        def obstacle_center(entry, name):
            if not isinstance(entry, dict):
                raise ScenarioError(name, "expected a mapping with x/y")
            return LocalPoint(
                _number(_require(entry, "x", name + "."), name + ".x"),
                _number(_require(entry, "y", name + "."), name + ".y"),
            )

    entries = doc.get("obstacles") or []
    if not isinstance(entries, list):
        raise ScenarioError("obstacles", "expected a list")
    obstacles = []
    for k, entry in enumerate(entries):
        name = f"obstacles[{k}]"
        obstacles.append(
            Obstacle(
                obstacle_center(entry, name),
                _number(_require(entry, "radius", name + "."), name + ".radius"),
            )
        )

    w = doc.get("weights") or {}
    if not isinstance(w, dict):
        raise ScenarioError("weights", "expected a mapping")
    weights = Weights(
        _number(w.get("alpha", 1.0), "weights.alpha"),
        _number(w.get("beta", 1.0), "weights.beta"),
        _number(w.get("gamma", 1.0), "weights.gamma"),
    )
    count = doc.get("waypoint_count", 10)
    if isinstance(count, bool) or not isinstance(count, int):
        raise ScenarioError("waypoint_count", "must be a positive integer")

    return Scenario(
        lower_bound=lower,
        upper_bound=upper,
        start=point(_require(doc, "start", ""), "start"),
        goal=point(_require(doc, "goal", ""), "goal"),
        obstacles=tuple(obstacles),
        h_min=_number(_require(doc, "h_min", ""), "h_min"),
        h_max=_number(_require(doc, "h_max", ""), "h_max"),
        weights=weights,
        waypoint_count=count,
        origin=origin,
    )


def load_scenario(config_text: str) -> Scenario:
    """Parse and validate a scenario document. Raises :class:`ScenarioError`."""
    return scenario_from_dict(parse_config(config_text))
