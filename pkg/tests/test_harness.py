import json

import numpy as np
import pytest

from conftest import SCENARIOS
from ftlbo import harness
from ftlbo.harness import main, parse_algorithms, parse_seeds, read_nodes_csv
from ftlbo.scenario import ScenarioError
from ftlbo.waypoints import PlanVerificationError

SMALL = """
frame: local
origin: {lat: 12.2331044, lon: 109.1144313}
waypoint_count: 4
h_min: 2
h_max: 7
bounds: {lower: [0, 0], upper: [60, 40], z_min: 1.5, z_max: 8}
start: [5, 5, 4]
goal: [55, 35, 4]
obstacles:
  - {x: 30, y: 20, radius: 4}
formation:
  offsets: [[0, 0, 2], [3, 0, -1], [-3, 0, -1]]
optimizer: {pop: 20, iters: 25, seed: 1}
"""


@pytest.fixture
def small(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    return p


def _files(d):
    return {f.relative_to(d).as_posix(): f.read_bytes() for f in sorted(d.rglob("*")) if f.is_file()}


def test_validate(small, capsys):
    assert main(["validate", "--scenario", str(small)]) == 0
    out = capsys.readouterr().out
    assert "equal radius VIOLATED" in out
    assert main(["validate", "--scenario", str(SCENARIOS / "paper_like.yaml")]) == 0


def test_bad_scenario_exit(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text(SMALL.replace("h_max: 7", "h_max: 2"))
    assert main(["plan", "--scenario", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "altitude band empty" in capsys.readouterr().err
    assert main(["validate", "--scenario", str(tmp_path / "missing.yaml")]) == 2


def test_goal_in_obstacle(tmp_path):
    p = tmp_path / "blocked.yaml"
    p.write_text(SMALL.replace("{x: 30, y: 20, radius: 4}", "{x: 54, y: 34, radius: 4}"))
    out = tmp_path / "o"
    assert main(["plan", "--scenario", str(p), "--out", str(out)]) == 3
    assert not list(out.glob("*.waypoints"))
    assert main(["validate", "--scenario", str(p)]) == 3


def test_plan_outputs(small, tmp_path):
    out = tmp_path / "plan"
    assert main(["plan", "--scenario", str(small), "--out", str(out)]) == 0
    names = set(_files(out))
    expect = {"centroid_path.csv", "cost.json", "convergence.csv", "report.json"}
    expect |= {f"uav_{n}_path.csv" for n in (1, 2, 3)} | {f"uav_{n}.waypoints" for n in (1, 2, 3)}
    assert names == expect
    cost = json.loads((out / "cost.json").read_text())
    assert set(cost) == {"length_cost", "safety_cost", "task_cost", "total"}
    nodes = read_nodes_csv(out / "centroid_path.csv")
    assert nodes.shape == (6, 3)
    uavs = [read_nodes_csv(out / f"uav_{n}_path.csv") for n in (1, 2, 3)]
    assert np.abs(np.mean(uavs, axis=0) - nodes).max() <= 1e-12
    report = json.loads((out / "report.json").read_text())
    assert report["config"] == SMALL
    assert (out / "convergence.csv").read_text().startswith("iteration,evaluations,best_total,mean_total\n")


def test_plan_byte_identical(small, tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for d, extra in ((a, []), (b, []), (c, ["--workers", "4"])):
        assert main(["plan", "--scenario", str(small), "--seed", "7", "--out", str(d), *extra]) == 0
    assert _files(a) == _files(b) == _files(c)


def test_plan_without_origin_skips_waypoints(tmp_path):
    p = tmp_path / "noorigin.yaml"
    p.write_text(SMALL.replace("origin: {lat: 12.2331044, lon: 109.1144313}\n", ""))
    out = tmp_path / "o"
    assert main(["plan", "--scenario", str(p), "--out", str(out)]) == 0
    assert not list(out.glob("*.waypoints"))
    assert main(["export", "--scenario", str(p), "--path", str(out / "centroid_path.csv"),
                 "--out", str(tmp_path / "e")]) == 2


def test_export_reproduces_plan(small, tmp_path):
    out, exp = tmp_path / "plan", tmp_path / "exp"
    main(["plan", "--scenario", str(small), "--out", str(out)])
    assert main(["export", "--scenario", str(small), "--path", str(out / "centroid_path.csv"), "--out", str(exp)]) == 0
    for n in (1, 2, 3):
        assert (exp / f"uav_{n}.waypoints").read_bytes() == (out / f"uav_{n}.waypoints").read_bytes()


def test_export_rejects_unsafe_path(small, tmp_path):
    csv = tmp_path / "path.csv"
    rows = ["node,x,y,z", "0,5.0,5.0,4.0", "1,20,20,4", "2,30,20,4", "3,40,20,4", "4,50,30,4", "5,55.0,35.0,4.0"]
    csv.write_text("\n".join(rows) + "\n")
    assert main(["export", "--scenario", str(small), "--path", str(csv), "--out", str(tmp_path / "e")]) == 3
    csv.write_text("\n".join(rows[:3]) + "\n")
    assert main(["export", "--scenario", str(small), "--path", str(csv), "--out", str(tmp_path / "e")]) == 2


def test_verification_failure_exit(small, tmp_path, monkeypatch):
    def boom(*a, **k):
        raise PlanVerificationError("forced")

    monkeypatch.setattr(harness, "verify_plan", boom)
    out = tmp_path / "o"
    assert main(["plan", "--scenario", str(small), "--out", str(out)]) == 4
    assert not list(out.glob("*.waypoints"))


def test_compare_outputs(small, tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "--scenario", str(small), "--seeds", "2", "--out", str(out)]) == 0
    lines = (out / "summary.csv").read_text().splitlines()
    assert lines[0].startswith("algorithm,runs,min_cost,median_cost,max_cost")
    assert [l.split(",")[0] for l in lines[1:]] == ["FTLBO", "TLBO", "THETA_PSO", "GA"]
    report = json.loads((out / "report.json").read_text())
    assert len(report["runs"]) == 8
    assert report["budget"] == {"mode": "evaluations", "evaluations": 20 + 25 * 60}
    for r in report["runs"]:
        assert r["evaluations"] <= report["budget"]["evaluations"]
    assert len(list((out / "convergence").glob("*.csv"))) == 8
    # statistics recompute from raw entries
    ft = [float(r["cost"]["total"]) for r in report["runs"] if r["algorithm"] == "FTLBO"]
    assert float(report["statistics"]["FTLBO"]["min_cost"]) == min(ft)


def test_compare_iteration_budget(small, tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "--scenario", str(small), "--seeds", "0,", "--budget", "iterations",
                 "--algorithms", "ga,theta-pso", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert all(r["iterations"] == 25 for r in report["runs"])


def test_compare_matches_plan(small, tmp_path):
    main(["plan", "--scenario", str(small), "--seed", "3", "--out", str(tmp_path / "p")])
    main(["compare", "--scenario", str(small), "--seeds", "3,", "--algorithms", "FTLBO", "--out", str(tmp_path / "c")])
    plan = json.loads((tmp_path / "p" / "report.json").read_text())["runs"]
    comp = json.loads((tmp_path / "c" / "report.json").read_text())["runs"]
    assert plan == comp


def test_compare_parallel_identical(small, tmp_path):
    args = ["compare", "--scenario", str(small), "--seeds", "0-2"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b"), "--jobs", "3", "--workers", "2"]) == 0
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_compare_bad_algorithm(small, tmp_path, capsys):
    assert main(["compare", "--scenario", str(small), "--algorithms", "ACO", "--out", str(tmp_path / "o")]) == 2
    assert "unknown algorithm" in capsys.readouterr().err


def test_parse_helpers():
    assert parse_seeds("3") == [0, 1, 2]
    assert parse_seeds("4,9") == [4, 9]
    assert parse_seeds("5-7") == [5, 6, 7]
    with pytest.raises(ValueError):
        parse_seeds("0")
    assert parse_algorithms("ftlbo, theta_pso") == ["FTLBO", "THETA_PSO"]
    with pytest.raises(ValueError):
        parse_algorithms("")


def test_formation_from_radius():
    spec = harness.formation_from_dict({"uav_count": 4, "radius": 2.0, "plane_normal": [0, 0, 1]})
    assert spec.uav_count == 4
    np.testing.assert_allclose(np.linalg.norm(spec.offsets, axis=1), 2.0)
    with pytest.raises(ScenarioError):
        harness.formation_from_dict({"uav_count": 3})
    with pytest.raises(ScenarioError):
        harness.formation_from_dict({"offsets": [[0, 0]]})
