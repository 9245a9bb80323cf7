"""Teaching-learning-based optimisation of centroid paths.

Two drivers live here: :func:`run_tlbo`, the plain teacher/learner loop, and
:func:`run_ftlbo`, which adds chaotic mutation of the current best, elite
replacement of the worst student and multi-subject learning.

A student is a flattened waypoint vector ``[x1, y1, z1, ..., xm, ym, zm]``.
The classroom keeps all vectors in one ``(P, 3m)`` array so every phase scores
its candidates as a single batch. Random draws happen in the calling thread in
a fixed order, so results depend only on the seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .fitness import (
    CostArrays,
    CostBreakdown,
    EvaluationContext,
    evaluate_batch,
    is_better,
    rank_columns,
)
from .formation import CentroidPath
from .scenario import Scenario

log = logging.getLogger(__name__)

# Logistic-map seeds near these values fall onto fixed points or short cycles.
_CHAOS_TRAPS = (0.25, 0.5, 0.75)
_CHAOS_TRAP_WIDTH = 1e-6


class InfeasibleScenarioError(ValueError):
    """No path can have finite cost (an endpoint is inside an obstacle...)."""


@dataclass
class Student:
    vector: np.ndarray
    cost: CostBreakdown

    def path(self, scenario: Scenario) -> CentroidPath:
        return CentroidPath.from_vector(scenario.start, self.vector, scenario.goal)


@dataclass(frozen=True)
class ConvergenceEntry:
    iteration: int
    best_total: float
    mean_total: float
    evaluations: int


@dataclass
class ConvergenceRecord:
    entries: list[ConvergenceEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def best_totals(self) -> list[float]:
        return [e.best_total for e in self.entries]

    def iterations_to_within(self, rel: float = 0.01) -> int:
        """First iteration whose best total is within ``rel`` of the final one."""
        final = self.entries[-1].best_total
        for e in self.entries:
            if e.best_total <= final * (1 + rel) if np.isfinite(final) else e.best_total == final:
                return e.iteration
        return self.entries[-1].iteration

    def to_csv(self) -> str:
        lines = ["iteration,evaluations,best_total,mean_total"]
        for e in self.entries:
            lines.append(f"{e.iteration},{e.evaluations},{e.best_total!r},{e.mean_total!r}")
        return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    algorithm: str
    best: Student
    record: ConvergenceRecord

    @property
    def iterations(self) -> int:
        return self.record.entries[-1].iteration

    @property
    def evaluations(self) -> int:
        return self.record.entries[-1].evaluations


@dataclass
class TLBOParams:
    pop: int = 100
    iters: int = 150
    seed: int = 0
    # stop early once another iteration would exceed this many evaluations
    max_evaluations: int | None = None
    straight_line_seed: bool = False


@dataclass
class FTLBOParams(TLBOParams):
    subjects: int | None = None  # defaults to the waypoint count
    mutation_scale: float | None = None  # meters; None -> 5% of each axis range
    mutants: int | None = None  # mutated copies of the best per iteration; None -> pop


@dataclass
class Classroom:
    vectors: np.ndarray
    costs: CostArrays
    lower: np.ndarray
    upper: np.ndarray
    rng: np.random.Generator
    subjects: int = 1
    chaos_state: float = 0.5
    iteration: int = 0
    max_iteration: int = 1
    evaluations: int = 0

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def students(self) -> list[Student]:
        return [Student(self.vectors[i].copy(), self.costs.breakdown(i)) for i in range(self.size)]

    def best_index(self) -> int:
        """Lowest-ranked student; ties go to the smaller index."""
        return int(np.lexsort(rank_columns(self.costs))[0])

    def worst_index(self) -> int:
        """Highest-ranked student; ties go to the smaller index."""
        cols = (-np.arange(self.size),) + rank_columns(self.costs)
        return int(np.lexsort(cols)[-1])

    def best(self) -> Student:
        i = self.best_index()
        return Student(self.vectors[i].copy(), self.costs.breakdown(i))

    def clip(self, vectors: np.ndarray) -> np.ndarray:
        return np.clip(vectors, self.lower, self.upper)

    def accept(self, idx: np.ndarray, candidates: np.ndarray, costs: CostArrays) -> int:
        """Replace students ``idx`` by candidates that are strictly better."""
        mask = is_better(costs, self.costs.take(idx))
        rows = idx[mask]
        self.vectors[rows] = candidates[mask]
        self.costs.put(rows, costs.take(mask))
        return int(mask.sum())

    def snapshot(self) -> ConvergenceEntry:
        i = self.best_index()
        return ConvergenceEntry(
            self.iteration,
            float(self.costs.total[i]),
            float(np.mean(self.costs.total)),
            self.evaluations,
        )


# ---------------------------------------------------------------------------
# setup


def axis_bounds(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate bounds for a flattened waypoint vector."""
    m = scenario.waypoint_count
    return np.tile(scenario.lower, m), np.tile(scenario.upper, m)


def straight_line_vector(scenario: Scenario) -> np.ndarray:
    m = scenario.waypoint_count
    t = np.arange(1, m + 1) / (m + 1)
    s, g = scenario.start.as_array(), scenario.goal.as_array()
    return (s + t[:, None] * (g - s)).ravel()


def initial_population(ctx: EvaluationContext, pop: int, rng: np.random.Generator,
                       straight_line_seed: bool = False) -> np.ndarray:
    """Uniform random vectors inside the working volume."""
    lower, upper = axis_bounds(ctx.scenario)
    vectors = rng.random((pop, lower.size)) * (upper - lower) + lower
    if straight_line_seed:
        vectors[0] = np.clip(straight_line_vector(ctx.scenario), lower, upper)
    return vectors


def check_feasible(ctx: EvaluationContext) -> None:
    scen = ctx.scenario
    centers, radii = ctx.obstacles()
    for name, p in (("start", scen.start), ("goal", scen.goal)):
        d = np.hypot(centers[:, 0] - p.x, centers[:, 1] - p.y)
        hit = np.flatnonzero(d <= radii)
        if hit.size:
            raise InfeasibleScenarioError(f"{name} lies inside obstacle {int(hit[0])}")
        if np.any(p.z + ctx.formation.offsets[:, 2] <= 0):
            raise InfeasibleScenarioError(f"a UAV is at or below ground at the {name}")


def new_classroom(ctx: EvaluationContext, params: TLBOParams, subjects: int = 1,
                  vectors: np.ndarray | None = None) -> Classroom:
    if params.pop < 4:
        raise ValueError("class size must be at least 4")
    if params.iters < 0:
        raise ValueError("iteration count must be nonnegative")
    check_feasible(ctx)
    rng = np.random.default_rng(params.seed)
    if vectors is None:
        vectors = initial_population(ctx, params.pop, rng, params.straight_line_seed)
    lower, upper = axis_bounds(ctx.scenario)
    cls = Classroom(
        vectors=np.array(vectors, dtype=float),
        costs=evaluate_batch(vectors, ctx),
        lower=lower,
        upper=upper,
        rng=rng,
        subjects=subjects,
        max_iteration=max(params.iters, 1),
        evaluations=len(vectors),
    )
    return cls


# ---------------------------------------------------------------------------
# phases


def teacher_phase(cls: Classroom, ctx: EvaluationContext) -> Classroom:
    teacher = cls.vectors[cls.best_index()]
    mean = cls.vectors.mean(axis=0)
    n = cls.size
    lam = cls.rng.integers(1, 3, size=n)
    w0 = cls.rng.random(n)
    cand = cls.clip(cls.vectors + w0[:, None] * (teacher - lam[:, None] * mean))
    costs = evaluate_batch(cand, ctx)
    cls.evaluations += n
    cls.accept(np.arange(n), cand, costs)
    return cls


def _other_indices(rng: np.random.Generator, n: int, size) -> np.ndarray:
    """Draw indices in [0, n) that differ from their row index."""
    draws = rng.integers(0, n - 1, size=size)
    rows = np.arange(n).reshape((n,) + (1,) * (draws.ndim - 1))
    return draws + (draws >= rows)


def learner_phase(cls: Classroom, ctx: EvaluationContext) -> Classroom:
    n = cls.size
    pairs = np.empty((n, 2), dtype=int)
    for i in range(n):
        pick = cls.rng.choice(n - 1, size=2, replace=False)
        pairs[i] = pick + (pick >= i)
    w = cls.rng.random(n)
    diff = np.abs(cls.vectors[pairs[:, 0]] - cls.vectors[pairs[:, 1]])
    cand = cls.clip(cls.vectors + w[:, None] * diff)
    costs = evaluate_batch(cand, ctx)
    cls.evaluations += n
    cls.accept(np.arange(n), cand, costs)
    return cls


def chaos_step(x: float) -> float:
    """One logistic-map iteration, clipped against rounding outside [0, 1]."""
    return min(1.0, max(0.0, 4.0 * x * (1.0 - x)))


def mutation_variable(x: float) -> float:
    return 2.0 * x - 1.0


def mutation_probability(iteration: int, max_iteration: int) -> float:
    if max_iteration <= 0 or not 0 <= iteration <= max_iteration:
        raise ValueError("need 0 <= iteration <= max_iteration and max_iteration > 0")
    return 1.0 - iteration / max_iteration


def seed_chaos(rng: np.random.Generator) -> float:
    while True:
        x = float(rng.uniform(0.01, 0.99))
        if all(abs(x - t) > _CHAOS_TRAP_WIDTH for t in _CHAOS_TRAPS):
            return x


def advance_chaos(cls: Classroom) -> float:
    prev = cls.chaos_state
    x = chaos_step(prev)
    if x == 0.0 or x == prev:
        # collapsed onto a fixed point
        x = seed_chaos(cls.rng)
    cls.chaos_state = x
    return x


def default_mutation_scale(scenario: Scenario) -> np.ndarray:
    return 0.05 * np.tile(scenario.upper - scenario.lower, scenario.waypoint_count)


def _mutate(base: np.ndarray, count: int, cls: Classroom, scale: np.ndarray) -> np.ndarray:
    mu = mutation_probability(cls.iteration, cls.max_iteration)
    gate = cls.rng.random((count, base.size))
    cand = np.tile(base, (count, 1))
    for r, k in zip(*np.nonzero(gate < mu)):
        cand[r, k] += mutation_variable(cls.chaos_state) * scale[k]
        advance_chaos(cls)
    return cls.clip(cand)


def mutate_student(s: Student, cls: Classroom, ctx: EvaluationContext, scale=None) -> Student:
    """Chaotic per-dimension perturbation of ``s``.

    Each coordinate mutates with probability ``1 - iteration/max_iteration``.
    Mutated coordinates are shifted by ``(2x - 1) * scale`` where ``x`` is the
    chaos state; the chaos sequence advances after every mutated coordinate.
    """
    if scale is None:
        scale = default_mutation_scale(ctx.scenario)
    scale = np.broadcast_to(np.asarray(scale, dtype=float), s.vector.shape)
    cand = _mutate(s.vector, 1, cls, scale)
    cls.evaluations += 1
    return Student(cand[0], evaluate_batch(cand, ctx).breakdown(0))


def mutation_round(cls: Classroom, ctx: EvaluationContext, count: int, scale) -> Classroom:
    """Offer ``count`` mutants of the current best to elite replacement.

    Mutants are generated one after another, so a mutant that overtakes the
    best becomes the parent of the next one.
    """
    scale = np.broadcast_to(np.asarray(scale, dtype=float), cls.lower.shape)
    for _ in range(count):
        cand = _mutate(cls.vectors[cls.best_index()], 1, cls, scale)
        costs = evaluate_batch(cand, ctx)
        cls.evaluations += 1
        _elite_insert(cls, cand[0], costs)
    return cls


def _elite_insert(cls: Classroom, vector: np.ndarray, cost: CostArrays) -> None:
    w = cls.worst_index()
    cls.accept(np.array([w]), vector[None], cost)


def elite_replace(cls: Classroom, candidate: Student) -> Classroom:
    _elite_insert(cls, candidate.vector, CostArrays.from_breakdowns([candidate.cost]))
    return cls


def subject_blocks(waypoint_count: int, subjects: int) -> list[slice]:
    """Split the waypoints into contiguous groups; one group per subject."""
    if not 1 <= subjects <= waypoint_count:
        raise ValueError(f"subjects must be in [1, {waypoint_count}]")
    groups = np.array_split(np.arange(waypoint_count), subjects)
    return [slice(3 * int(g[0]), 3 * int(g[-1]) + 3) for g in groups]


def multi_subject_learner_phase(cls: Classroom, ctx: EvaluationContext) -> Classroom:
    n = cls.size
    blocks = subject_blocks(ctx.scenario.waypoint_count, cls.subjects)
    partners = _other_indices(cls.rng, n, (n, len(blocks)))
    w = cls.rng.random((n, len(blocks)))
    cand = cls.vectors.copy()
    for j, blk in enumerate(blocks):
        own = cls.vectors[:, blk]
        cand[:, blk] = own + w[:, j, None] * np.abs(own - cls.vectors[partners[:, j], blk])
    cand = cls.clip(cand)
    costs = evaluate_batch(cand, ctx)
    cls.evaluations += n
    cls.accept(np.arange(n), cand, costs)
    return cls


# ---------------------------------------------------------------------------
# drivers


def _budget_allows(cls: Classroom, params: TLBOParams, per_iteration: int) -> bool:
    if cls.iteration >= params.iters:
        return False
    return params.max_evaluations is None or cls.evaluations + per_iteration <= params.max_evaluations


def ftlbo_evaluations_per_iteration(pop: int, mutants: int | None = None) -> int:
    return 2 * pop + (pop if mutants is None else mutants)


def ftlbo_budget(pop: int, iters: int, mutants: int | None = None) -> int:
    """Total evaluations used by a full FTLBO run (initial class included)."""
    return pop + iters * ftlbo_evaluations_per_iteration(pop, mutants)


def run_tlbo(ctx: EvaluationContext, params: TLBOParams | None = None,
             vectors: np.ndarray | None = None) -> RunResult:
    """Plain teacher + learner loop. ``vectors`` overrides the random start."""
    params = params or TLBOParams()
    cls = new_classroom(ctx, params, vectors=vectors)
    record = ConvergenceRecord([cls.snapshot()])
    while _budget_allows(cls, params, 2 * cls.size):
        teacher_phase(cls, ctx)
        learner_phase(cls, ctx)
        cls.iteration += 1
        record.entries.append(cls.snapshot())
    return RunResult("TLBO", cls.best(), record)


def run_ftlbo(ctx: EvaluationContext, params: FTLBOParams | None = None,
              vectors: np.ndarray | None = None) -> RunResult:
    params = params or FTLBOParams()
    scen = ctx.scenario
    subjects = params.subjects or scen.waypoint_count
    if params.mutation_scale is None:
        scale = default_mutation_scale(scen)
    else:
        scale = np.full(scen.dimension, float(params.mutation_scale))
    subject_blocks(scen.waypoint_count, subjects)  # validate early
    cls = new_classroom(ctx, params, subjects=subjects, vectors=vectors)
    mutants = cls.size if params.mutants is None else params.mutants
    if mutants < 0:
        raise ValueError("mutant count must be nonnegative")
    cls.chaos_state = seed_chaos(cls.rng)
    record = ConvergenceRecord([cls.snapshot()])
    while _budget_allows(cls, params, ftlbo_evaluations_per_iteration(cls.size, mutants)):
        advance_chaos(cls)
        teacher_phase(cls, ctx)
        mutation_round(cls, ctx, mutants, scale)
        multi_subject_learner_phase(cls, ctx)
        cls.iteration += 1
        entry = cls.snapshot()
        record.entries.append(entry)
        best = cls.costs.breakdown(cls.best_index())
        log.debug("iter %d best %.6g violation %.6g", cls.iteration, entry.best_total, best.safety_cost)
    return RunResult("FTLBO", cls.best(), record)
