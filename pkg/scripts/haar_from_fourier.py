"""Haar wavelet signal from Fourier samples: truncated series, GS and PBDW.

N = 32 Haar functions and M = 64 Fourier samples; the Haar wavelet lies in
the reconstruction space, so GS and PBDW recover it while the truncated
Fourier series rings at the jumps.
"""

import argparse
import os

from stablesampling import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/haar_from_fourier")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    cli.main(
        ["reconstruct", "--sampling", "fourier", "--wavelet", "haar", "--level", "5",
         "--mmax", "64", "--depth", "10", "--signal", "haar_wavelet", "--out", args.out]
    )
    print(open(os.path.join(args.out, "errors.csv")).read())


if __name__ == "__main__":
    main()
