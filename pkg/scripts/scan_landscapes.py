"""Sweep the extremal-family slack landscapes on cones and their truncations.

For each configured density the script scans both quotient families over a
log-spaced lambda grid, writes one CSV per (density, family) pair, and draws
a two-panel overview figure.  The point of the picture: on exact cones both
curves sit at zero to quadrature accuracy, while truncation drags the
quadratic-family slack to -N^2/4 as lambda -> 0 and makes the weighted
family cross zero at finite lambda.

Usage:
    python scripts/scan_landscapes.py --out out/landscapes
    python scripts/scan_landscapes.py --out out --lambda-count 121 --no-plot
"""

import argparse
import csv
import pathlib
import sys

import numpy as np

from needlelab.functionals import CknParams
from needlelab.space import PowerLaw, TruncatedPowerLaw
from needlelab.variational import family_scan

CASES = [
    # (tag, density, hpw dimension, ckn parameters)
    ("cone-n3", PowerLaw(1.0, 3.0), 3.0, None),
    ("cone-n2.5", PowerLaw(1.0, 2.5), 2.5, CknParams(4.0, 1.0, 2.5)),
    ("trunc-n3", TruncatedPowerLaw(1.0, 3.0, 1.0), 3.0, None),
    ("trunc-n2.5", TruncatedPowerLaw(1.0, 2.5, 1.0), 2.5, CknParams(4.0, 1.0, 2.5)),
    ("trunc-n4-r2", TruncatedPowerLaw(1.0, 4.0, 2.0), 4.0, None),
]


def write_csv(path: pathlib.Path, res) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["lambda", "slack", "quad_error"])
        for lam, v, e in zip(res.lambdas, res.values, res.errors):
            w.writerow([repr(lam), repr(v), repr(e)])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/landscapes", help="output directory")
    ap.add_argument("--lambda-count", type=int, default=61)
    ap.add_argument("--lambda-min", type=float, default=1e-3)
    ap.add_argument("--lambda-max", type=float, default=1e3)
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = np.geomspace(args.lambda_min, args.lambda_max, args.lambda_count)

    scans = []
    for tag, density, dim, ckn in CASES:
        res = family_scan(density, dim, "hpw", lambdas=grid)
        write_csv(out / f"{tag}-hpw.csv", res)
        scans.append((tag, "hpw", res))
        print(f"{tag:12s} hpw  min={res.min_value:+.6e} at lambda={res.argmin_lambda:g}")
        if ckn is not None:
            res = family_scan(density, ckn, "ckn", lambdas=grid)
            write_csv(out / f"{tag}-ckn.csv", res)
            scans.append((tag, "ckn", res))
            print(f"{tag:12s} ckn  min={res.min_value:+.6e} at lambda={res.argmin_lambda:g}")

    if not args.no_plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
        for tag, kind, res in scans:
            ax = axes[0] if kind == "hpw" else axes[1]
            ax.plot(res.lambdas, res.values, marker=".", ms=3, label=tag)
        for ax, title in zip(axes, ("quadratic family", "weighted family")):
            ax.set_xscale("log")
            ax.axhline(0.0, color="k", lw=0.6)
            ax.set_xlabel("lambda")
            ax.set_title(title)
            ax.legend(fontsize=8)
        axes[0].set_ylabel("slack")
        fig.tight_layout()
        fig.savefig(out / "landscapes.svg")
        print(f"wrote {out / 'landscapes.svg'}")

    return 0


if __name__ == "__main__":
    sys.exit(main())
