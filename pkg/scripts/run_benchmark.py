#!/usr/bin/env python3
"""Run every bundled scenario config and print a one-line summary per run."""

import sys
from pathlib import Path

from wellspectra.scenario import run_scenario

CONFIGS = ["ball_well_3d.cfg", "gaussian_well_2d.cfg", "empty_level_1d.cfg"]


def main():
    root = Path(__file__).resolve().parent.parent
    worst = 0
    for name in CONFIGS:
        result = run_scenario(root / "configs" / name)
        status = "ok" if not result.violations else f"{len(result.violations)} violations"
        print(f"{name}: {len(result.rows)} rows -> {result.csv_path} [{status}]")
        worst = max(worst, result.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
