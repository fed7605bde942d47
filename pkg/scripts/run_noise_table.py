"""Noise-transmission table: closed forms, dual-route integrals, Monte Carlo.

The analytic columns need no randomness; the Monte Carlo columns replay
exactly for a given seed.
"""

import argparse
import pathlib
import sys

from specfilt.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--trials", type=int, default=10000)
    parser.add_argument("--grid-n", type=int, default=512)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / "noise_transmission.csv"
    rc = cli(["noise", "--trials", str(args.trials), "--grid-n", str(args.grid_n),
              "--seed", str(args.seed), "--out", str(dest), "--no-timestamp"])
    if rc == 0:
        print(f"wrote {dest}")
    return rc


if __name__ == "__main__":
    sys.exit(run())
