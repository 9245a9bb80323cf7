"""Four-algorithm comparison on the obstacle field, 20 seeds, equal evaluations.

Writes report.json, summary.csv and per-run convergence curves to --out.
Equivalent to ``ftlbo compare`` with the defaults spelled out.
"""

import argparse
import os
import sys
from pathlib import Path

from ftlbo.harness import main as cli

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=str(ROOT / "scenarios" / "paper_like.yaml"))
    ap.add_argument("--seeds", default="20")
    ap.add_argument("--out", default="results/comparison")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    return cli([
        "compare", "--scenario", args.scenario, "--seeds", args.seeds,
        "--algorithms", "FTLBO,TLBO,THETA_PSO,GA", "--budget", "evaluations",
        "--jobs", str(args.jobs), "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
