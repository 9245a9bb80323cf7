"""Rewrite the waypoint golden files under tests/golden.

Only run this after an intentional change to the export format.
"""

import argparse
from pathlib import Path

import numpy as np

from ftlbo.formation import CentroidPath, FormationSpec, derive_uav_paths
from ftlbo.harness import main as cli
from ftlbo.scenario import load_scenario
from ftlbo.waypoints import export_waypoints

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"
SCENARIO = ROOT / "scenarios" / "paper_like.yaml"
OFFSETS = [[0.0, 0.0, 2.0], [3.0, 0.0, -1.0], [-3.0, 0.0, -1.0]]
# hand-placed centroid waypoints threading the paper-like layout
FIXED_WAYPOINTS = [
    [14.0, 14.0, 4.0], [22.0, 11.0, 4.5], [33.0, 9.0, 5.0], [40.0, 6.0, 5.0], [52.0, 8.0, 4.5],
    [56.0, 20.0, 4.0], [60.0, 22.0, 4.0], [72.0, 24.0, 4.0], [78.0, 32.0, 4.0], [80.0, 38.0, 4.0],
]
PLAN_ARGS = ["--pop", "60", "--iters", "60", "--seed", "3"]


def fixed_files() -> dict[str, str]:
    scen = load_scenario(SCENARIO.read_text())
    path = CentroidPath(scen.start, np.array(FIXED_WAYPOINTS), scen.goal)
    spec = FormationSpec.from_offsets(OFFSETS)
    return {f"fixed_uav_{p.uav_index}.waypoints": export_waypoints(p, scen.origin) for p in derive_uav_paths(path, spec)}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(GOLDEN))
    out = Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in fixed_files().items():
        (out / name).write_text(text)
    plan_dir = out / "plan_seed3"
    cli(["plan", "--scenario", str(SCENARIO), "--out", str(plan_dir), *PLAN_ARGS])
    for f in plan_dir.iterdir():
        if f.suffix != ".waypoints":
            f.unlink()
    print(f"wrote goldens to {out}")


if __name__ == "__main__":
    main()
