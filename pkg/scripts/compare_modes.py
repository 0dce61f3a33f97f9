"""Equivalence check of pass modes on small random circuits.

For every (mode, reset soundness) pair, report how many sites fired and the
largest total variation distance between the original and optimized outcome
distributions. Only the conservative/strict pair is expected to stay exact.
"""

from __future__ import annotations

import argparse
import itertools
import time

import numpy as np

from dyncirc import randgen
from dyncirc.pcm import PassConfig, run_pass
from dyncirc.sim import distribution, tvd


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-pcm", type=int, default=16)
    ap.add_argument("--n-max", type=int, default=4)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    suite = [
        randgen.generate(randgen.GenConfig(
            n_qubits=int(rng.integers(4, 7)), depth=int(rng.integers(10, 41)),
            meas_density=0.1, reset_density=0.05, seed=int(rng.integers(2**31))))
        for _ in range(args.count)
    ]
    refs = [distribution(c) for c in suite]
    for mode, soundness in itertools.product(("conservative", "faithful"), ("strict", "paper")):
        cfg = PassConfig(n_pcm=args.n_pcm, n_max=args.n_max, mode=mode,
                         reset_soundness=soundness)
        start = time.perf_counter()
        worst, removed, broken = 0.0, 0, 0
        for c, ref in zip(suite, refs):
            out, rep = run_pass(c, cfg)
            d = tvd(ref, distribution(out))
            worst = max(worst, d)
            removed += rep.removed
            broken += d > 1e-9
        print(f"{mode:>12} {soundness:>6}: removed {removed:>4}, circuits changed {broken:>3}, "
              f"max tvd {worst:.3g}  ({time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
