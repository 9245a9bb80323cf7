"""Median theta-PSO cost on the obstacle field as a function of the velocity cap.

Shows how strongly the baseline ranking depends on this one knob.
"""

import argparse
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ftlbo.baselines import THETA_PSO, BaselineParams, run_theta_pso
from ftlbo.fitness import EvaluationContext
from ftlbo.harness import load_problem
from ftlbo.optimizer import ftlbo_budget

ROOT = Path(__file__).resolve().parents[1]


def _one(job):
    problem, vmax, seed, budget = job
    ctx = EvaluationContext(problem.scenario, problem.formation)
    p = BaselineParams(THETA_PSO, seed=seed, iters=10**9, max_evaluations=budget, velocity_limit=vmax)
    return vmax, run_theta_pso(ctx, p).best.cost.total


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=str(ROOT / "scenarios" / "paper_like.yaml"))
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--limits", default="0.1,0.3,0.6283185307179586,1.0,1.5707963267948966")
    args = ap.parse_args()
    problem = load_problem(args.scenario)
    budget = ftlbo_budget(100, 150)
    limits = [float(v) for v in args.limits.split(",")]
    jobs = [(problem, v, s, budget) for v in limits for s in range(args.seeds)]
    with ProcessPoolExecutor() as pool:
        results = list(pool.map(_one, jobs))
    print(f"{'vmax':>8} {'median':>10} {'infeasible':>10}")
    for v in limits:
        costs = [c for vm, c in results if vm == v]
        print(f"{v:8.3f} {statistics.median(costs):10.2f} {sum(math.isinf(c) for c in costs):10d}")


if __name__ == "__main__":
    main()
