"""Stable sampling rate Theta(N, theta) / N for Haar, db2 and db8 from Walsh samples.

Writes results/ssr_slopes.csv with one row per (wavelet, N).
"""

import argparse
import os

from stablesampling.gramian import ssr
from stablesampling.output import write_csv
from stablesampling.wavelets import Basis, BasisSpec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--theta", type=float, default=2.0)
    ap.add_argument("--levels", type=int, nargs="+", default=[5, 6, 7, 8])
    ap.add_argument("--guard", type=int, default=7, help="grid depth minus level")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    rows = []
    for name in ("haar", "db2", "db8"):
        for R in args.levels:
            spec = BasisSpec.from_name(name, R=R)
            depth = R + (1 if name == "haar" else args.guard)
            res = ssr(args.theta, "walsh", Basis(spec, depth), 4 * spec.N)
            ratio = "" if res.Theta is None else res.Theta / spec.N
            rows.append((name, spec.N, res.Theta, ratio, res.mu))
            print(f"{name:5s} N={spec.N:4d} Theta={res.Theta} ratio={ratio}")
    os.makedirs(args.out, exist_ok=True)
    write_csv(
        os.path.join(args.out, "ssr_slopes.csv"),
        ("wavelet", "N", "Theta", "ratio", "mu"),
        rows,
        f"theta={args.theta} guard={args.guard}",
    )


if __name__ == "__main__":
    main()
