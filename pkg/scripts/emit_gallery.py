#!/usr/bin/env python3
"""Write every built-in gallery scene to JSON files, one per (scene, prime)."""

import argparse
import pathlib

from xcartier.gallery import GALLERY_NAMES, gallery
from xcartier.scene import emit_scene


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", type=pathlib.Path)
    parser.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7])
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for p in args.primes:
        for name in GALLERY_NAMES:
            path = args.outdir / f"{name}_p{p}.json"
            path.write_text(emit_scene(gallery(name, p)))
            print(path)


if __name__ == "__main__":
    main()
