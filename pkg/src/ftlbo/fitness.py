"""Path cost: weighted sum of length, obstacle violation and altitude terms.

All costs are computed on batches of flattened waypoint vectors so that an
optimizer can score a whole population in one call. Single-path helpers are
thin wrappers around the batch code, which keeps both routes bit-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .formation import CentroidPath, FormationSpec, UavPath
from .scenario import LocalPoint, Obstacle, Scenario

INF = math.inf


@dataclass(frozen=True)
class CostBreakdown:
    length_cost: float
    safety_cost: float
    task_cost: float
    total: float
    # ranks infeasible candidates: how deep the infinite terms are violated,
    # then the sum of the finite weighted terms
    infeasibility: float = 0.0
    partial: float = 0.0

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.total)

    def sort_key(self) -> tuple[int, float, float, float]:
        if self.feasible:
            return (0, 0, self.total, 0.0)
        return (1, self.infeasibility, self.partial, self.length_cost)

    def better_than(self, other: "CostBreakdown") -> bool:
        return self.sort_key() < other.sort_key()

    def as_dict(self) -> dict:
        return {
            "length_cost": self.length_cost,
            "safety_cost": self.safety_cost,
            "task_cost": self.task_cost,
            "total": self.total,
        }


@dataclass(frozen=True)
class EvaluationContext:
    scenario: Scenario
    formation: FormationSpec
    strict_uav_safety: bool = False
    workers: int = 1
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def start(self) -> np.ndarray:
        return self.scenario.start.as_array()

    @property
    def goal(self) -> np.ndarray:
        return self.scenario.goal.as_array()

    def obstacles(self) -> tuple[np.ndarray, np.ndarray]:
        if "obstacles" not in self._cache:
            self._cache["obstacles"] = self.scenario.obstacle_arrays()
        return self._cache["obstacles"]


# ---------------------------------------------------------------------------
# scalar terms


def length_cost(path: CentroidPath) -> float:
    nodes = path.nodes()
    return float(np.linalg.norm(np.diff(nodes, axis=0), axis=1).sum())


def _horizontal_distances(a: np.ndarray, b: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Distance in the x-y plane from segments a->b to obstacle centers.

    ``a`` and ``b`` have shape (..., S, 3); ``centers`` is (K, 2). Returns
    (..., S, K). Zero-length segments are treated as points.
    """
    a2 = a[..., :, None, :2]
    ab = (b - a)[..., :, None, :2]
    ap = centers - a2
    den = (ab * ab).sum(axis=-1)
    num = (ap * ab).sum(axis=-1)
    safe_den = np.where(den > 0, den, 1.0)
    t = np.where(den > 0, np.clip(num / safe_den, 0.0, 1.0), 0.0)
    diff = ap - t[..., None] * ab
    return np.sqrt((diff * diff).sum(axis=-1))


def segment_obstacle_violation(a: LocalPoint, b: LocalPoint, obs: Obstacle) -> float:
    d = float(
        _horizontal_distances(
            a.as_array()[None], b.as_array()[None], np.array([[obs.center.x, obs.center.y]])
        )[0, 0]
    )
    return obs.radius / d if d > obs.radius else INF


def _violation_terms(d: np.ndarray, radii: np.ndarray) -> np.ndarray:
    safe_d = np.where(d > radii, d, 1.0)
    return np.where(d > radii, radii / safe_d, INF)


def safety_cost(path: CentroidPath, scenario: Scenario) -> float:
    if not scenario.obstacles:
        return 0.0
    centers, radii = scenario.obstacle_arrays()
    nodes = path.nodes()
    v = _violation_terms(_horizontal_distances(nodes[:-1], nodes[1:], centers), radii)
    return float(v.sum() / v.size)


def altitude_cost_at(h: float, h_min: float, h_max: float) -> float:
    if h <= 0:
        return INF
    if h < h_min:
        return h_min - h
    if h > h_max:
        return h - h_max
    return 0.0


def _altitude_costs(h: np.ndarray, h_min: float, h_max: float) -> np.ndarray:
    below = np.maximum(h_min - h, 0.0)
    above = np.maximum(h - h_max, 0.0)
    return np.where(h <= 0, INF, below + above)


def task_cost(uav_paths: list[UavPath], scenario: Scenario) -> float:
    if not uav_paths:
        return 0.0
    h = np.stack([p.nodes[:, 2] for p in uav_paths], axis=-1)
    return float(_altitude_costs(h, scenario.h_min, scenario.h_max).sum())


# ---------------------------------------------------------------------------
# batch evaluation


@dataclass
class CostArrays:
    """Per-candidate cost terms for a batch, aligned with the input rows."""

    length: np.ndarray
    safety: np.ndarray
    task: np.ndarray
    total: np.ndarray
    infeasibility: np.ndarray
    partial: np.ndarray

    FIELDS = ("length", "safety", "task", "total", "infeasibility", "partial")

    def __len__(self) -> int:
        return len(self.total)

    def breakdown(self, i: int) -> CostBreakdown:
        return CostBreakdown(
            float(self.length[i]),
            float(self.safety[i]),
            float(self.task[i]),
            float(self.total[i]),
            float(self.infeasibility[i]),
            float(self.partial[i]),
        )

    def take(self, idx) -> "CostArrays":
        return CostArrays(*(np.asarray(getattr(self, f))[idx] for f in self.FIELDS))

    def put(self, idx, other: "CostArrays") -> None:
        for f in self.FIELDS:
            getattr(self, f)[idx] = getattr(other, f)

    @classmethod
    def concat(cls, parts) -> "CostArrays":
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in cls.FIELDS))

    @classmethod
    def from_breakdowns(cls, costs) -> "CostArrays":
        return cls(
            np.array([c.length_cost for c in costs], dtype=float),
            np.array([c.safety_cost for c in costs], dtype=float),
            np.array([c.task_cost for c in costs], dtype=float),
            np.array([c.total for c in costs], dtype=float),
            np.array([c.infeasibility for c in costs], dtype=float),
            np.array([c.partial for c in costs], dtype=float),
        )

    def breakdowns(self) -> list[CostBreakdown]:
        return [self.breakdown(i) for i in range(len(self))]


def _penetration(d: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """1 + relative intrusion depth for every segment inside a disk, else 0."""
    return np.where(d <= radii, 2.0 - d / radii, 0.0)


def _weighted(weight: float, term: np.ndarray) -> np.ndarray:
    # 0 * inf would be nan; a zero weight switches the term off entirely.
    if weight == 0:
        return np.zeros_like(term)
    return weight * term


def _evaluate_block(vectors: np.ndarray, ctx: EvaluationContext, start, goal) -> CostArrays:
    scen = ctx.scenario
    b = vectors.shape[0]
    wp = vectors.reshape(b, -1, 3)
    start = np.broadcast_to(start, (b, 1, 3))
    goal = np.broadcast_to(goal, (b, 1, 3))
    nodes = np.concatenate([start, wp, goal], axis=1)
    seg = nodes[:, 1:] - nodes[:, :-1]
    length = np.sqrt((seg * seg).sum(axis=2)).sum(axis=1)

    offsets = ctx.formation.offsets
    alpha, beta, gamma = scen.weights.as_tuple()
    depth = np.zeros(b)
    if scen.obstacles:
        centers, radii = ctx.obstacles()
        if ctx.strict_uav_safety:
            # centroid plus every UAV path, averaged over all of them
            paths = np.concatenate([nodes[:, None], nodes[:, None] + offsets[None, :, None, :]], axis=1)
            d = _horizontal_distances(paths[:, :, :-1], paths[:, :, 1:], centers)
            v = _violation_terms(d, radii)
            safety = v.reshape(b, -1).sum(axis=1) / (v.shape[1] * v.shape[2] * v.shape[3])
            if beta > 0:
                depth += _penetration(d, radii).reshape(b, -1).sum(axis=1)
        else:
            d = _horizontal_distances(nodes[:, :-1], nodes[:, 1:], centers)
            v = _violation_terms(d, radii)
            safety = v.reshape(b, -1).sum(axis=1) / (v.shape[1] * v.shape[2])
            if beta > 0:
                depth += _penetration(d, radii).reshape(b, -1).sum(axis=1)
    else:
        safety = np.zeros(b)

    h = nodes[:, :, 2, None] + offsets[None, None, :, 2]
    alt = _altitude_costs(h, scen.h_min, scen.h_max).reshape(b, -1)
    task = alt.sum(axis=1)
    if gamma > 0:
        depth += np.where(h <= 0, 1.0 - h, 0.0).reshape(b, -1).sum(axis=1)

    terms = np.stack([_weighted(alpha, length), _weighted(beta, safety), _weighted(gamma, task)])
    total = terms[0] + terms[1] + terms[2]
    finite = np.where(np.isfinite(terms), terms, 0.0)
    partial = finite[0] + finite[1] + finite[2]
    return CostArrays(length, safety, task, total, depth, partial)


def evaluate_batch(vectors: np.ndarray, ctx: EvaluationContext, start=None, goal=None) -> CostArrays:
    """Score every row of ``vectors`` (shape (B, 3m)).

    Endpoints default to the scenario's start and goal. With
    ``ctx.workers > 1`` rows are split across threads; every row's value is
    independent of how the batch is split.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    start = ctx.start if start is None else np.asarray(start, dtype=float)
    goal = ctx.goal if goal is None else np.asarray(goal, dtype=float)
    n = vectors.shape[0]
    if ctx.workers <= 1 or n < 2:
        return _evaluate_block(vectors, ctx, start, goal)
    chunks = np.array_split(np.arange(n), min(ctx.workers, n))
    with ThreadPoolExecutor(max_workers=ctx.workers) as pool:
        parts = list(pool.map(lambda idx: _evaluate_block(vectors[idx], ctx, start, goal), chunks))
    return CostArrays.concat(parts)


def evaluate(path: CentroidPath, ctx: EvaluationContext) -> CostBreakdown:
    """Cost of one centroid path; safety on the centroid, altitude on every UAV."""
    vec = path.waypoints.reshape(1, -1)
    return evaluate_batch(vec, ctx, path.start.as_array(), path.goal.as_array()).breakdown(0)


def is_better(a: CostArrays, b: CostArrays) -> np.ndarray:
    """Row-wise strict ``a < b`` under the CostBreakdown total order."""
    a_fin = np.isfinite(a.total)
    b_fin = np.isfinite(b.total)
    both_fin = a_fin & b_fin
    both_inf = ~a_fin & ~b_fin
    inf_better = (a.infeasibility < b.infeasibility) | (
        (a.infeasibility == b.infeasibility)
        & ((a.partial < b.partial) | ((a.partial == b.partial) & (a.length < b.length)))
    )
    return (a_fin & ~b_fin) | (both_fin & (a.total < b.total)) | (both_inf & inf_better)


def rank_columns(costs: CostArrays) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort keys for ``np.lexsort`` (least significant first).

    Matches :meth:`CostBreakdown.sort_key` row by row.
    """
    infeasible = ~np.isfinite(costs.total)
    primary = np.where(infeasible, costs.partial, costs.total)
    secondary = np.where(infeasible, costs.length, 0.0)
    return secondary, primary, np.where(infeasible, costs.infeasibility, 0.0), infeasible.astype(int)

