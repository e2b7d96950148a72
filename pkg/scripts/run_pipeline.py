"""End-to-end experiment: simulate both cohorts, screen them, train and
evaluate all three models at sea level, and print the comparison tables.

Usage: python scripts/run_pipeline.py [--seed 42] [--output-dir out] [--hpo-trials 0]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from epodetect.cli import main as cli


def run(argv: list[str]) -> None:
    print(f"\n$ epodetect {' '.join(argv)}")
    code = cli(argv)
    if code != 0:
        sys.exit(code)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--output-dir", default="out")
    parser.add_argument("--hpo-trials", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.output_dir)
    seed = str(args.seed)

    for altitude in ("sea", "alt"):
        sub = out / altitude
        run(["simulate", "--altitude", altitude, "--seed", seed, "--output-dir", str(sub)])
        run([
            "screen", "--input", str(sub / "cohort.csv"), "--altitude", altitude,
            "--seed", seed, "--output-dir", str(sub),
        ])

    run([
        "train-eval", "--input", str(out / "sea" / "cohort.csv"), "--altitude", "sea",
        "--seed", seed, "--hpo-trials", str(args.hpo_trials),
        "--output-dir", str(out / "sea"),
    ])
    print(f"\nall reports under {out}/")


if __name__ == "__main__":
    main()
