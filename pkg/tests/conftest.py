from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ftlbo.fitness import EvaluationContext
from ftlbo.formation import FormationSpec
from ftlbo.scenario import GeoPoint, LocalPoint, Obstacle, Scenario, Weights

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"
PAPER_OFFSETS = [[0.0, 0.0, 2.0], [3.0, 0.0, -1.0], [-3.0, 0.0, -1.0]]
ORIGIN = GeoPoint(12.2331044, 109.1144313)


def make_scenario(obstacles=(), waypoints=10, lower=(0, 0, 1.5), upper=(100, 60, 8),
                  start=(10, 10, 4), goal=(90, 50, 4), h=(2.0, 7.0), weights=(1, 1, 1), origin=ORIGIN):
    return Scenario(
        lower_bound=LocalPoint(*map(float, lower)),
        upper_bound=LocalPoint(*map(float, upper)),
        start=LocalPoint(*map(float, start)),
        goal=LocalPoint(*map(float, goal)),
        obstacles=tuple(Obstacle(LocalPoint(float(x), float(y)), float(r)) for x, y, r in obstacles),
        h_min=float(h[0]),
        h_max=float(h[1]),
        weights=Weights(*map(float, weights)),
        waypoint_count=waypoints,
        origin=origin,
    )


def paper_formation():
    return FormationSpec.from_offsets(PAPER_OFFSETS)


def random_small_scenario(rng: np.random.Generator, waypoints: int, max_obstacles: int = 3, box=20.0):
    """Random small box with up to ``max_obstacles`` disks clear of both endpoints."""
    while True:
        start = (rng.uniform(0, 3), rng.uniform(0, box), rng.uniform(2.5, 5.5))
        goal = (rng.uniform(box - 3, box), rng.uniform(0, box), rng.uniform(2.5, 5.5))
        obs = []
        for _ in range(rng.integers(0, max_obstacles + 1)):
            x, y, r = rng.uniform(4, box - 4), rng.uniform(2, box - 2), rng.uniform(0.5, 3.0)
            if all(np.hypot(x - p[0], y - p[1]) > r + 0.5 for p in (start, goal)):
                obs.append((x, y, r))
        try:
            return make_scenario(obs, waypoints, lower=(0, 0, 0.5), upper=(box, box, 9.0),
                                 start=start, goal=goal, h=(2.0, 7.0))
        except ValueError:
            continue


@pytest.fixture
def open_field():
    return make_scenario()


@pytest.fixture
def open_ctx(open_field):
    return EvaluationContext(open_field, paper_formation())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
