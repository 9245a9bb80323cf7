"""Command-line front end: plan, compare, export and validate.

Exit codes: 0 success, 2 invalid input, 3 infeasible problem or result,
4 plan failed post-export verification.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import GA, THETA_PSO, BaselineParams, run_baseline
from .fitness import EvaluationContext, evaluate_batch
from .formation import CentroidPath, FormationSpec, check_formation_rules, derive_uav_paths, regular_offsets
from .optimizer import (
    FTLBOParams,
    InfeasibleScenarioError,
    RunResult,
    TLBOParams,
    check_feasible,
    ftlbo_budget,
    run_ftlbo,
    run_tlbo,
)
from .scenario import LocalPoint, Scenario, ScenarioError, parse_config, scenario_from_dict
from .waypoints import PlanVerificationError, export_waypoints, verify_plan

log = logging.getLogger("ftlbo")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4

ALGORITHMS = ("FTLBO", "TLBO", THETA_PSO, GA)


@dataclass
class Problem:
    scenario: Scenario
    formation: FormationSpec
    options: dict = field(default_factory=dict)
    text: str = ""

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()


def formation_from_dict(doc) -> FormationSpec:
    if doc is None:
        return FormationSpec(1, np.zeros((1, 3)))
    if not isinstance(doc, dict):
        raise ScenarioError("formation", "expected a mapping")
    if "offsets" in doc:
        try:
            return FormationSpec.from_offsets(doc["offsets"])
        except (TypeError, ValueError) as exc:
            raise ScenarioError("formation.offsets", str(exc)) from None
    try:
        return regular_offsets(
            int(doc.get("uav_count", 3)),
            float(doc["radius"]),
            tuple(doc.get("plane_normal", (0.0, 1.0, 0.0))),
        )
    except KeyError:
        raise ScenarioError("formation", "give either offsets or radius") from None
    except (TypeError, ValueError) as exc:
        raise ScenarioError("formation", str(exc)) from None


def load_problem(path) -> Problem:
    text = Path(path).read_text()
    doc = parse_config(text)
    scenario = scenario_from_dict(doc)
    formation = formation_from_dict(doc.get("formation"))
    options = doc.get("optimizer") or {}
    if not isinstance(options, dict):
        raise ScenarioError("optimizer", "expected a mapping")
    return Problem(scenario, formation, options, text)


# ---------------------------------------------------------------------------
# running


@dataclass(frozen=True)
class RunSpec:
    algorithm: str
    seed: int
    pop: int
    iters: int
    max_evaluations: int | None = None
    subjects: int | None = None
    mutation_scale: float | None = None
    straight_line_seed: bool = False


def run_algorithm(ctx: EvaluationContext, spec: RunSpec) -> RunResult:
    common = dict(
        pop=spec.pop,
        iters=spec.iters,
        seed=spec.seed,
        max_evaluations=spec.max_evaluations,
        straight_line_seed=spec.straight_line_seed,
    )
    if spec.algorithm == "FTLBO":
        return run_ftlbo(ctx, FTLBOParams(**common, subjects=spec.subjects, mutation_scale=spec.mutation_scale))
    if spec.algorithm == "TLBO":
        return run_tlbo(ctx, TLBOParams(**common))
    if spec.algorithm in (GA, THETA_PSO):
        return run_baseline(ctx, BaselineParams(spec.algorithm, **common))
    raise ValueError(f"unknown algorithm {spec.algorithm!r}")


def _json_float(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def run_entry(result: RunResult, seed: int, wall: float | None = None) -> dict:
    entry = {
        "algorithm": result.algorithm,
        "seed": seed,
        "cost": {k: _json_float(v) for k, v in result.best.cost.as_dict().items()},
        "initial_best": _json_float(result.record.entries[0].best_total),
        "iterations": result.iterations,
        "iterations_to_1pct": result.record.iterations_to_within(0.01),
        "evaluations": result.evaluations,
    }
    if wall is not None:
        entry["wall_seconds"] = round(wall, 3)
    return entry


def _as_float(v) -> float:
    return float(v)


def aggregate(entries: list[dict]) -> dict:
    stats = {}
    for alg in dict.fromkeys(e["algorithm"] for e in entries):
        finals = [_as_float(e["cost"]["total"]) for e in entries if e["algorithm"] == alg]
        initial = [_as_float(e["initial_best"]) for e in entries if e["algorithm"] == alg]
        iters = [e["iterations_to_1pct"] for e in entries if e["algorithm"] == alg]
        stats[alg] = {
            "runs": len(finals),
            "min_cost": _json_float(min(finals)),
            "median_cost": _json_float(statistics.median(finals)),
            "max_cost": _json_float(max(finals)),
            "median_initial_best": _json_float(statistics.median(initial)),
            "median_iterations_to_1pct": statistics.median(iters),
        }
    return stats


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _nodes_csv(nodes: np.ndarray) -> str:
    lines = ["node,x,y,z"]
    for j, (x, y, z) in enumerate(nodes):
        lines.append(f"{j},{float(x)!r},{float(y)!r},{float(z)!r}")
    return "\n".join(lines) + "\n"


def read_nodes_csv(path) -> np.ndarray:
    rows = Path(path).read_text().strip().splitlines()[1:]
    return np.array([[float(v) for v in r.split(",")[1:4]] for r in rows], dtype=float)


def write_plan_files(out: Path, problem: Problem, ctx: EvaluationContext, result: RunResult) -> list[str]:
    """Verify and write a planned result. Returns the written file names."""
    scen = problem.scenario
    path = result.best.path(scen)
    nodes = path.nodes()
    uav_paths = derive_uav_paths(path, problem.formation)
    cost = result.best.cost
    verify_plan(scen, nodes, uav_paths, problem.formation, cost.total, ctx.strict_uav_safety, cost.task_cost)

    out.mkdir(parents=True, exist_ok=True)
    files = {
        "centroid_path.csv": _nodes_csv(nodes),
        "cost.json": _dump_json({k: _json_float(v) for k, v in cost.as_dict().items()}),
        "convergence.csv": result.record.to_csv(),
    }
    for p in uav_paths:
        files[f"uav_{p.uav_index}_path.csv"] = _nodes_csv(p.nodes)
    if cost.feasible:
        if scen.origin is None:
            log.warning("scenario has no geodetic origin; skipping waypoint files")
        else:
            for p in uav_paths:
                files[f"uav_{p.uav_index}.waypoints"] = export_waypoints(p, scen.origin)
    for name, text in files.items():
        (out / name).write_text(text)
    return sorted(files)


# ---------------------------------------------------------------------------
# subcommands


def _context(problem: Problem, args) -> EvaluationContext:
    return EvaluationContext(
        problem.scenario,
        problem.formation,
        strict_uav_safety=args.strict_per_uav_safety,
        workers=args.workers,
    )


def _option(args, problem: Problem, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return problem.options.get(name, default)


def _spec(args, problem: Problem, algorithm: str, seed: int, max_evaluations=None, iters=None) -> RunSpec:
    scale = _option(args, problem, "mutation_scale", None)
    return RunSpec(
        algorithm=algorithm,
        seed=seed,
        pop=int(_option(args, problem, "pop", 100)),
        iters=int(iters if iters is not None else _option(args, problem, "iters", 150)),
        max_evaluations=max_evaluations,
        subjects=_option(args, problem, "subjects", None),
        mutation_scale=None if scale is None else float(scale),
        straight_line_seed=bool(_option(args, problem, "straight_line_seed", False)),
    )


def cmd_validate(args) -> int:
    problem = load_problem(args.scenario)
    s = problem.scenario
    print(f"bounds      {s.lower.tolist()} .. {s.upper.tolist()}")
    print(f"start/goal  {s.start.as_array().tolist()} -> {s.goal.as_array().tolist()}")
    print(f"obstacles   {len(s.obstacles)}")
    print(f"altitude    [{s.h_min}, {s.h_max}] m; waypoints {s.waypoint_count}")
    report = check_formation_rules(problem.formation, tol=args.tol)
    print(f"formation   {problem.formation.uav_count} UAVs, "
          f"equal radius {'ok' if report.equal_radius_ok else 'VIOLATED'} "
          f"(max dev {report.radius_errors.max():.4g} m), "
          f"equal spacing {'ok' if report.equal_spacing_ok else 'VIOLATED'} "
          f"(max dev {report.neighbor_mismatch.max():.4g} m)")
    try:
        check_feasible(_context(problem, args))
    except InfeasibleScenarioError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_plan(args) -> int:
    problem = load_problem(args.scenario)
    ctx = _context(problem, args)
    seed = args.seed if args.seed is not None else int(problem.options.get("seed", 0))
    spec = _spec(args, problem, "FTLBO", seed)
    t0 = time.perf_counter()
    result = run_algorithm(ctx, spec)
    wall = time.perf_counter() - t0
    cost = result.best.cost
    if not cost.feasible:
        print(f"no feasible path found (best cost {cost.total}); nothing exported", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = Path(args.out)
    write_plan_files(out, problem, ctx, result)
    report = {
        "scenario_sha256": problem.digest,
        "config": problem.text,
        "runs": [run_entry(result, seed)],
    }
    report["statistics"] = aggregate(report["runs"])
    (out / "report.json").write_text(_dump_json(report))
    print(f"FTLBO seed {seed}: total {cost.total:.4f} (length {cost.length_cost:.4f}, "
          f"safety {cost.safety_cost:.4f}, task {cost.task_cost:.4f}) "
          f"in {result.iterations} iterations, {result.evaluations} evaluations, {wall:.2f} s")
    print(f"wrote {out}")
    return EXIT_OK


def parse_seeds(text: str) -> list[int]:
    """``"20"`` -> 0..19; ``"3,7"`` -> [3, 7]; ``"5-9"`` -> 5..9."""
    text = text.strip()
    if "," in text:
        return [int(t) for t in text.split(",") if t.strip()]
    if "-" in text[1:]:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    n = int(text)
    if n < 1:
        raise ValueError("need at least one seed")
    return list(range(n))


def parse_algorithms(text: str) -> list[str]:
    algs = [a.strip().upper().replace("-", "_") for a in text.split(",") if a.strip()]
    for a in algs:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    if not algs:
        raise ValueError("no algorithms given")
    return algs


def _run_one(payload):
    problem, strict, spec = payload
    ctx = EvaluationContext(problem.scenario, problem.formation, strict_uav_safety=strict)
    t0 = time.perf_counter()
    result = run_algorithm(ctx, spec)
    return result, time.perf_counter() - t0


def cmd_compare(args) -> int:
    problem = load_problem(args.scenario)
    try:
        algorithms = parse_algorithms(args.algorithms)
        seeds = parse_seeds(args.seeds)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    ctx = _context(problem, args)
    check_feasible(ctx)

    base = _spec(args, problem, "FTLBO", 0)
    budget = ftlbo_budget(base.pop, base.iters)
    specs = []
    for alg in algorithms:
        for seed in seeds:
            if args.budget == "evaluations" and alg != "FTLBO":
                # stop on the evaluation budget alone
                specs.append(_spec(args, problem, alg, seed, max_evaluations=budget, iters=10**9))
            else:
                specs.append(_spec(args, problem, alg, seed))

    payloads = [(problem, args.strict_per_uav_safety, s) for s in specs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_run_one, payloads))
    else:
        outcomes = [_run_one(p) for p in payloads]

    out = Path(args.out)
    conv = out / "convergence"
    conv.mkdir(parents=True, exist_ok=True)
    entries = []
    for spec, (result, wall) in zip(specs, outcomes):
        entries.append(run_entry(result, spec.seed, wall if args.timings else None))
        (conv / f"{spec.algorithm}_seed{spec.seed}.csv").write_text(result.record.to_csv())
    stats = aggregate(entries)
    report = {
        "scenario_sha256": problem.digest,
        "config": problem.text,
        "budget": {"mode": args.budget, "evaluations": budget if args.budget == "evaluations" else None},
        "runs": entries,
        "statistics": stats,
    }
    (out / "report.json").write_text(_dump_json(report))

    header = "algorithm,runs,min_cost,median_cost,max_cost,median_initial_best,median_iterations_to_1pct"
    lines = [header]
    for alg, st in stats.items():
        lines.append(",".join(str(v) for v in (
            alg, st["runs"], st["min_cost"], st["median_cost"], st["max_cost"],
            st["median_initial_best"], st["median_iterations_to_1pct"],
        )))
    (out / "summary.csv").write_text("\n".join(lines) + "\n")

    print(f"{'algorithm':<10} {'min':>10} {'median':>10} {'max':>10} {'start':>10} {'iters':>6}")
    for alg, st in stats.items():
        print(f"{alg:<10} {_fmt(st['min_cost'])} {_fmt(st['median_cost'])} {_fmt(st['max_cost'])} "
              f"{_fmt(st['median_initial_best'])} {st['median_iterations_to_1pct']:>6}")
    print(f"wrote {out}")
    return EXIT_OK


def _fmt(v) -> str:
    return f"{_as_float(v):>10.2f}"


def cmd_export(args) -> int:
    problem = load_problem(args.scenario)
    scen = problem.scenario
    if scen.origin is None:
        print("error: scenario has no geodetic origin", file=sys.stderr)
        return EXIT_INVALID
    nodes = read_nodes_csv(args.path)
    if len(nodes) != scen.waypoint_count + 2:
        print(f"error: expected {scen.waypoint_count + 2} nodes, got {len(nodes)}", file=sys.stderr)
        return EXIT_INVALID
    path = CentroidPath(LocalPoint.from_seq(nodes[0]), nodes[1:-1], LocalPoint.from_seq(nodes[-1]))
    ctx = _context(problem, args)
    cost = evaluate_batch(path.waypoints.reshape(1, -1), ctx, nodes[0], nodes[-1]).breakdown(0)
    uav_paths = derive_uav_paths(path, problem.formation)
    if not cost.feasible:
        print(f"error: path cost is {cost.total}; refusing to export", file=sys.stderr)
        return EXIT_INFEASIBLE
    verify_plan(scen, nodes, uav_paths, problem.formation, cost.total, ctx.strict_uav_safety, cost.task_cost)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for p in uav_paths:
        (out / f"uav_{p.uav_index}.waypoints").write_text(export_waypoints(p, scen.origin, args.format))
    print(f"wrote {len(uav_paths)} waypoint files to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftlbo", description="UAV formation path planning with FTLBO")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, optimizer=True):
        p.add_argument("--scenario", required=True, help="scenario YAML file")
        p.add_argument("--strict-per-uav-safety", action="store_true",
                       help="also charge obstacle violations of every UAV path")
        p.add_argument("--workers", type=int, default=1, help="threads for batch fitness evaluation")
        if optimizer:
            p.add_argument("--pop", type=int)
            p.add_argument("--iters", type=int)
            p.add_argument("--subjects", type=int)
            p.add_argument("--mutation-scale", type=float, help="mutation step in meters")
            p.add_argument("--straight-line-seed", action="store_true", default=None,
                           help="put the straight start-goal path in the initial class")

    p = sub.add_parser("plan", help="plan one formation path with FTLBO")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compare", help="compare algorithms over several seeds")
    common(p)
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--seeds", default="20", help="count, comma list, or lo-hi range")
    p.add_argument("--budget", choices=("iterations", "evaluations"), default="evaluations")
    p.add_argument("--jobs", type=int, default=1, help="parallel runs (processes)")
    p.add_argument("--timings", action="store_true", help="record wall time (breaks byte-identical reports)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export", help="write waypoint files for a centroid path CSV")
    common(p, optimizer=False)
    p.add_argument("--path", required=True, help="centroid_path.csv from 'plan'")
    p.add_argument("--format", default="qgc-wpl-110")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("validate", help="check a scenario file")
    common(p, optimizer=False)
    p.add_argument("--tol", type=float, default=1e-9, help="formation rule tolerance in meters")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        if isinstance(exc, InfeasibleScenarioError):
            print(f"infeasible: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PlanVerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
