"""Reference optimizers for the algorithm comparison: GA and theta-PSO.

Both start from the same seeded population as the TLBO drivers (same seed,
same first RNG draws) and report progress in the same
:class:`~ftlbo.optimizer.ConvergenceRecord` schema.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fitness import CostArrays, EvaluationContext, evaluate_batch, is_better, rank_columns
from .optimizer import (
    Classroom,
    ConvergenceRecord,
    RunResult,
    Student,
    axis_bounds,
    new_classroom,
)

GA = "GA"
THETA_PSO = "THETA_PSO"


@dataclass
class BaselineParams:
    algorithm: str = GA
    pop: int = 100
    iters: int = 150
    seed: int = 0
    max_evaluations: int | None = None
    straight_line_seed: bool = False
    # GA
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # per gene; None -> 1 / dimension
    tournament_size: int = 3
    mutation_sigma: float = 0.05  # fraction of the axis range
    # theta-PSO
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    velocity_limit: float = 0.2 * math.pi  # radians per iteration

    def validate(self) -> None:
        if self.algorithm not in (GA, THETA_PSO):
            raise ValueError(f"unknown baseline {self.algorithm!r}")
        if self.pop < 4:
            raise ValueError("population must be at least 4")
        rate = 0.0 if self.mutation_rate is None else self.mutation_rate
        if not (0 <= self.crossover_rate <= 1 and 0 <= rate <= 1):
            raise ValueError("rates must lie in [0, 1]")
        if self.tournament_size < 1:
            raise ValueError("tournament size must be positive")


def _within_budget(iteration: int, evaluations: int, per_iteration: int, params) -> bool:
    if iteration >= params.iters:
        return False
    return params.max_evaluations is None or evaluations + per_iteration <= params.max_evaluations


def _ranks(cls: Classroom) -> np.ndarray:
    order = np.lexsort(rank_columns(cls.costs))
    ranks = np.empty(cls.size, dtype=int)
    ranks[order] = np.arange(cls.size)
    return ranks


def run_ga(ctx: EvaluationContext, params: BaselineParams | None = None,
           vectors: np.ndarray | None = None) -> RunResult:
    """Elitist generational GA.

    Tournament selection, per-gene arithmetic crossover, Gaussian mutation,
    and the best individual copied unchanged into every new generation.
    """
    params = params or BaselineParams(GA)
    params.validate()
    cls = new_classroom(ctx, params, vectors=vectors)
    rng = cls.rng
    n, dim = cls.vectors.shape
    sigma = params.mutation_sigma * (cls.upper - cls.lower)
    rate = 1.0 / dim if params.mutation_rate is None else params.mutation_rate
    record = ConvergenceRecord([cls.snapshot()])
    while _within_budget(cls.iteration, cls.evaluations, n - 1, params):
        ranks = _ranks(cls)
        contenders = rng.integers(0, n, size=(2, n - 1, params.tournament_size))
        winners = np.take_along_axis(contenders, ranks[contenders].argmin(axis=-1)[..., None], -1)[..., 0]
        p1, p2 = cls.vectors[winners[0]], cls.vectors[winners[1]]
        cross = rng.random(n - 1) < params.crossover_rate
        alpha = rng.random((n - 1, dim))
        children = np.where(cross[:, None], alpha * p1 + (1 - alpha) * p2, p1)
        mutate = rng.random((n - 1, dim)) < rate
        children = children + mutate * rng.normal(0.0, 1.0, (n - 1, dim)) * sigma
        children = cls.clip(children)

        elite = cls.best_index()
        child_costs = evaluate_batch(children, ctx)
        cls.evaluations += n - 1
        keep = np.array([elite])
        cls.vectors = np.vstack([cls.vectors[keep], children])
        cls.costs = CostArrays.concat([cls.costs.take(keep), child_costs])
        cls.iteration += 1
        record.entries.append(cls.snapshot())
    return RunResult(GA, cls.best(), record)


def decode_angles(theta: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Map phase angles in [-pi/2, pi/2] onto the box ``[lower, upper]``."""
    mid = 0.5 * (lower + upper)
    half = 0.5 * (upper - lower)
    # sin() is bounded; the clip only absorbs last-ulp rounding.
    return np.clip(mid + half * np.sin(theta), lower, upper)


def encode_positions(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    mid = 0.5 * (lower + upper)
    half = 0.5 * (upper - lower)
    return np.arcsin(np.clip((x - mid) / half, -1.0, 1.0))


def run_theta_pso(ctx: EvaluationContext, params: BaselineParams | None = None,
                  vectors: np.ndarray | None = None) -> RunResult:
    """Phase-angle PSO: particles move in angle space, positions are sin-decoded."""
    params = params or BaselineParams(THETA_PSO)
    params.validate()
    cls = new_classroom(ctx, params, vectors=vectors)
    rng = cls.rng
    lower, upper = axis_bounds(ctx.scenario)
    n, dim = cls.vectors.shape
    half_pi = math.pi / 2
    # iteration 0 scores the shared population as-is; angles are its encoding
    theta = encode_positions(cls.vectors, lower, upper)
    velocity = np.zeros_like(theta)
    pbest_theta = theta.copy()
    record = ConvergenceRecord([cls.snapshot()])
    while _within_budget(cls.iteration, cls.evaluations, n, params):
        g = cls.best_index()
        r1 = rng.random((n, dim))
        r2 = rng.random((n, dim))
        velocity = (
            params.inertia * velocity
            + params.cognitive * r1 * (pbest_theta - theta)
            + params.social * r2 * (pbest_theta[g] - theta)
        )
        velocity = np.clip(velocity, -params.velocity_limit, params.velocity_limit)
        theta = np.clip(theta + velocity, -half_pi, half_pi)
        positions = decode_angles(theta, lower, upper)
        costs = evaluate_batch(positions, ctx)
        cls.evaluations += n
        # the classroom holds personal bests
        improved = is_better(costs, cls.costs)
        pbest_theta[improved] = theta[improved]
        cls.accept(np.arange(n), positions, costs)
        cls.iteration += 1
        record.entries.append(cls.snapshot())
    return RunResult(THETA_PSO, cls.best(), record)


def run_baseline(ctx: EvaluationContext, params: BaselineParams,
                 vectors: np.ndarray | None = None) -> RunResult:
    if params.algorithm == GA:
        return run_ga(ctx, params, vectors)
    if params.algorithm == THETA_PSO:
        return run_theta_pso(ctx, params, vectors)
    raise ValueError(f"unknown baseline {params.algorithm!r}")


__all__ = [
    "GA",
    "THETA_PSO",
    "BaselineParams",
    "Student",
    "decode_angles",
    "encode_positions",
    "run_baseline",
    "run_ga",
    "run_theta_pso",
]
