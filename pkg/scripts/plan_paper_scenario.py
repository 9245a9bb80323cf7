"""Plan the three-UAV formation over the obstacle field and print the path."""

import argparse
from pathlib import Path

from ftlbo.harness import main as cli, read_nodes_csv

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/plan")
    args = ap.parse_args()
    code = cli(["plan", "--scenario", str(ROOT / "scenarios" / "paper_like.yaml"),
                "--seed", str(args.seed), "--out", args.out])
    if code:
        raise SystemExit(code)
    for j, (x, y, z) in enumerate(read_nodes_csv(Path(args.out) / "centroid_path.csv")):
        print(f"{j:>3} {x:8.2f} {y:8.2f} {z:6.2f}")


if __name__ == "__main__":
    main()
