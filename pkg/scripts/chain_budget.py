"""How many RF chains a square half-wavelength array needs, across sizes and bandwidths."""

import argparse

import numpy as np

from squintfree import ArrayGeometry, BandSpec, required_rf_chains, squint_factor, uv_from_angles


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f-c", type=float, default=300e9)
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--bandwidths", type=float, nargs="+", default=[1e9, 5e9, 10e9, 30e9])
    args = ap.parse_args()

    print("N_side  " + "".join(f"{w / 1e9:>7.0f}G" for w in args.bandwidths))
    for n in args.sizes:
        geom = ArrayGeometry.half_wavelength(n, n, args.f_c)
        worst = []
        for w in args.bandwidths:
            band = BandSpec(args.f_c, w)
            # alpha_up peaks at 45 degrees azimuth on the horizon
            chains = [required_rf_chains(squint_factor(geom, uv_from_angles(th, 90.0), band))
                      for th in np.arange(0, 360, 1.0)]
            worst.append(max(chains))
        print(f"{n:>6}  " + "".join(f"{c:>8d}" for c in worst))


if __name__ == "__main__":
    main()
