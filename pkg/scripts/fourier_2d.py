"""2D bump with a rectangular inset from Fourier samples (PGM output).

Writes the signal, truncated Fourier series, GS and PBDW images.
"""

import argparse
import os

from stablesampling import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", type=int, default=4)
    ap.add_argument("--mmax", type=int, default=32 * 32)
    ap.add_argument("--out", default="results/fourier_2d")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    cli.main(
        ["reconstruct", "--dim", "2", "--sampling", "fourier", "--wavelet", "haar",
         "--level", str(args.level), "--mmax", str(args.mmax), "--depth", "9",
         "--signal", "bump2d", "--out", args.out]
    )
    print(open(os.path.join(args.out, "errors.csv")).read())


if __name__ == "__main__":
    main()
