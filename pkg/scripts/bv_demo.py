"""Bernstein-Vazirani with qubit reuse: print the circuit before and after the pass."""

from __future__ import annotations

import argparse

from dyncirc.catalog import bv_reuse
from dyncirc.circuit import compile_shot, count_dynamic_ops
from dyncirc.pcm import PassConfig, run_pass
from dyncirc.qasm import serialize
from dyncirc.sim import distribution


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("secret", nargs="?", default="111111")
    args = ap.parse_args()

    before = bv_reuse(args.secret)
    after, report = run_pass(before, PassConfig(n_pcm=1))
    _, presets = compile_shot(after, 0)
    print(serialize(before))
    print(serialize(after))
    print("dynamic ops before:", count_dynamic_ops(before))
    print("dynamic ops after: ", count_dynamic_ops(after))
    print("presets:", "".join(str(presets[i]) for i in range(len(args.secret))))
    print("oracle distribution before:", distribution(before))
    print("oracle distribution after: ", distribution(after))
    print(f"removed {report.removed_measurements} measurements, {report.removed_resets} resets")


if __name__ == "__main__":
    main()
