"""Exact solve for every pole-chart Hamiltonian within degree bounds."""

import argparse
import json

from painleve_atlas.invariant_solver import uniqueness_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deg-z", type=int, default=2)
    ap.add_argument("--deg-w", type=int, default=8)
    ap.add_argument("--deg-t", type=int, default=1)
    ap.add_argument("--mode", choices=("rational_t", "polynomial_t"), default="rational_t")
    ap.add_argument("--no-entire", action="store_true", help="drop the regularity condition on XY")
    args = ap.parse_args()
    res = uniqueness_scan(args.deg_z, args.deg_w, args.deg_t, mode=args.mode, require_entire=not args.no_entire)
    print(json.dumps(res.summary(), indent=2))


if __name__ == "__main__":
    main()
