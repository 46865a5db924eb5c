#!/usr/bin/env python3
"""Measure the p-curvature sign of the forward transform across the gallery.

The sign relating psi(inverse transform) to the Frobenius pullback of the
Higgs field is convention-dependent, so it is measured rather than assumed.
This script prints the per-scene measurement and the global value.
"""

import argparse

from xcartier.gallery import gallery
from xcartier.sheaves import p_curvature
from xcartier.transforms import inverse_cartier, p_curvature_sign

HIGGS_SCENES = (
    "g1_trivial",
    "g2_a1_rank2",
    "g3_a1_three_lifts",
    "g4_p1_lemma",
    "g5_p1_uniformizing",
    "g6_a2_rank3",
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7])
    args = parser.parse_args()

    signs = set()
    for p in args.primes:
        for name in HIGGS_SCENES:
            scene = gallery(name, p)
            psi = p_curvature(inverse_cartier(scene.sheaf))
            sign = p_curvature_sign(scene.sheaf, psi)
            label = f"{sign:+d}" if sign is not None else "n/a (zero field)"
            print(f"p={p}  {name:24s} sign = {label}")
            if sign is not None:
                signs.add(sign)
    if len(signs) == 1:
        print(f"\nglobal sign: {signs.pop():+d}")
    else:
        raise SystemExit(f"inconsistent signs measured: {sorted(signs)}")


if __name__ == "__main__":
    main()
