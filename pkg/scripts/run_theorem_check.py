"""Weak-symmetry residuals on (TM, G) over the catalog, every preset and mode.

Flat bases should give FLAT_AND_WEAKLY_SYMMETRIC; curved bases should be
OBSTRUCTED in all four modes.  Ends with a nonzero status if any row disagrees.
"""

import argparse
import sys

import numpy as np

from gnatural import catalog
from gnatural.lift import PRESETS, TangentPoint
from gnatural.weaksym import FLAT, MODES, OBSTRUCTED, classify_bundle


def points(entry, count, seed, norm):
    rng = np.random.default_rng(seed)
    out = []
    for x in entry.sample_points(count, rng):
        y = rng.normal(size=entry.dim)
        out.append(TangentPoint(x, norm * y / np.linalg.norm(y)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--fiber-norm", type=float, default=1.0)
    args = ap.parse_args()
    bad = 0
    print(f"{'base':22s} {'preset':7s} {'mode':18s} {'min res':>9s} {'max res':>9s}  verdict")
    for name in catalog.NAMES:
        entry = catalog.make(name)
        pts = points(entry, args.points, args.seed, args.fiber_norm)
        want = FLAT if entry.known_flat else OBSTRUCTED
        for preset, params in PRESETS.items():
            for mode in MODES:
                rep = classify_bundle(entry.metric, params, pts, mode=mode)
                flag = "" if rep.verdict == want else "   <-- expected " + want
                bad += rep.verdict != want
                print(f"{name:22s} {preset:7s} {mode:18s} {rep.min_residual:9.3g} {rep.max_residual:9.3g}  {rep.verdict}{flag}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
