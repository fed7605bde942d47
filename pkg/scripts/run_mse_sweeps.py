"""Generate the comparative MSE-ratio tables for all four filter families.

Writes four deterministic csv files into the chosen output directory:
ra-bw ratio across the crossover band, gauss-hermite order families,
cosine-terminated spread families, and the combined comparison at the
standard parameters.
"""

import argparse
import pathlib
import sys

from specfilt.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out", help="destination directory")
    parser.add_argument("--eta-points", type=int, default=120)
    args = parser.parse_args(argv)
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    common = ["--no-timestamp", "--eta-points", str(args.eta_points)]
    jobs = [
        ("ra_bw_ratio.csv", ["sweep", "--kind", "ra-bw",
                             "--eta-min", "0.05", "--eta-max", "5.0"]),
        ("gh_orders.csv", ["sweep", "--kind", "gh", "--eta-min", "1.0",
                           "--eta-max", "5.0", "--m-list", "1,2,5,10,20,50,100"]),
        ("ct_spreads.csv", ["sweep", "--kind", "ct", "--eta-min", "1.0",
                            "--eta-max", "5.0", "--dk-list", "0.12,0.2,0.5,1.0"]),
        ("family_comparison.csv", ["sweep", "--kind", "compare",
                                   "--eta-min", "1.0", "--eta-max", "5.0"]),
    ]
    for name, argv_job in jobs:
        dest = out / name
        rc = cli(argv_job + common + ["--out", str(dest)])
        if rc != 0:
            print(f"{name}: failed with exit code {rc}", file=sys.stderr)
            return rc
        print(f"wrote {dest}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
