"""Acceptance gate: one test per criterion, each recording a pass/fail line.

The lines are printed in the pytest terminal summary and also when this file
is run directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from dyncirc import bench, randgen
from dyncirc.catalog import bv_reuse, disentangle_circuit, measure_reset_circuit, four_branch_circuit
from dyncirc.circuit import Circuit, Gate, ProbGate, compile_shot, count_dynamic_ops
from dyncirc.pcm import PassConfig, run_pass
from dyncirc.qcp import TOP, run
from dyncirc.sim import circuit_state, distribution, fidelity, states_match, tvd
from dyncirc.synth import GATE_COUNT_CONSTANT, state_prep, transform

from conftest import ACCEPTANCE
from helpers import oracle_state, random_state, random_static, same_up_to_phase

SEED = 2024
S2 = 1 / math.sqrt(2)


def record(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[num] = (bool(ok), detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_1_measure_reset_example():
    c = measure_reset_circuit()
    start = time.perf_counter()
    out, rep = run_pass(c, PassConfig(n_pcm=2, n_max=3))
    elapsed = time.perf_counter() - start
    ins = out.instructions
    shape = (
        ins[2] == Gate("h", (0,))
        and isinstance(ins[3], ProbGate)
        and [(b.ops, b.prob) for b in ins[3].branches]
        == [((), 0.5), ((Gate("x", (0,)),), 0.5)]
        and ins[5] == Gate("h", (2,))
        and ins[6:] == c.instructions[5:]
    )
    d = tvd(distribution(c), distribution(out))
    match = states_match(c, out, atol=1e-9)
    ok = (rep.removed_measurements, rep.removed_resets) == (1, 1) and shape and d <= 1e-9 \
        and match and elapsed < 1.0
    record(1, ok, f"removed {rep.removed_measurements}m/{rep.removed_resets}r, shape={shape}, "
                  f"tvd={d:.1e}, states_match={match}, {elapsed * 1e3:.1f} ms")


def _bv_pattern(out: Circuit, secret: str) -> bool:
    expected = [Gate("h", (1,)), Gate("z", (1,))]
    for i, bit in enumerate(secret):
        expected += [Gate("h", (0,))] + ([Gate("cx", (0, 1))] if bit == "1" else [])
        expected.append(Gate("h", (0,)))
        if i == len(secret) - 1:
            expected.append(Gate("h", (1,)))
        expected.append(("prob", i, int(bit)))
        if bit == "1":
            expected.append(Gate("x", (0,)))
    got = []
    for ins in out.instructions:
        if isinstance(ins, ProbGate):
            if len(ins.branches) != 1 or ins.branches[0].ops:
                return False
            ((clbit, bit),) = ins.branches[0].writes
            got.append(("prob", clbit, bit))
        else:
            got.append(ins)
    return got == expected


def test_criterion_2_bernstein_vazirani():
    rng = np.random.default_rng(SEED)
    secrets = ["111111"] + [
        "".join(rng.choice(["0", "1"], size=int(rng.integers(1, 11)))) for _ in range(20)
    ]
    failures = []
    slowest = 0.0
    for secret in secrets:
        c = bv_reuse(secret)
        start = time.perf_counter()
        out, rep = run_pass(c, PassConfig(n_pcm=1))
        elapsed = time.perf_counter() - start
        slowest = max(slowest, elapsed)
        _, presets = compile_shot(out, 0)
        left = count_dynamic_ops(out)
        recovered = "".join(str(presets.get(i, "?")) for i in range(len(secret)))
        ok = (
            rep.removed_measurements == rep.removed_resets == len(secret)
            and (left.measurements, left.resets) == (0, 0)
            and _bv_pattern(out, secret)
            and recovered == secret
            and elapsed < 1.0
        )
        if not ok:
            failures.append(secret)
    record(2, not failures, f"{len(secrets) - len(failures)}/{len(secrets)} secrets ok, "
                            f"slowest pass {slowest * 1e3:.1f} ms, failures={failures}")


def test_criterion_3_semantic_preservation():
    rng = np.random.default_rng(SEED)
    circuits = []
    for i in range(200):
        cfg = randgen.GenConfig(n_qubits=4 + i % 3, depth=int(rng.integers(10, 41)),
                                meas_density=0.1, reset_density=0.05,
                                seed=int(rng.integers(2**31)))
        circuits.append(randgen.generate(cfg))
    start = time.perf_counter()
    worst = 0.0
    removed = 0
    for c in circuits:
        ref = distribution(c)
        for n_pcm, n_max in ((1, 5), (16, 4)):
            out, rep = run_pass(c, PassConfig(n_pcm=n_pcm, n_max=n_max))
            removed += rep.removed
            worst = max(worst, tvd(ref, distribution(out)))
    elapsed = time.perf_counter() - start
    record(3, worst <= 1e-9 and elapsed < 300,
           f"200 circuits x 2 configs, {removed} removals, max tvd={worst:.1e}, {elapsed:.1f} s")


def test_criterion_4_qcp_soundness():
    rng = np.random.default_rng(SEED)
    bad = 0
    for _ in range(500):
        n = int(rng.integers(1, 5))
        c = random_static(rng, n, int(rng.integers(0, 20)))
        vec = run(c, n_max=4).final_statevector()
        if vec is None or not same_up_to_phase(vec, oracle_state(c)):
            bad += 1
    plus = np.array([S2, S2])
    snap = run(disentangle_circuit(), n_max=3).final.snapshot()
    three = [q for q, _ in snap] == [(0,), (1,), (2,)] and all(
        st is not TOP and same_up_to_phase(st.to_vector(), plus) for _, st in snap
    )
    c = measure_reset_circuit()
    res = run(c, n_max=3)
    m, r = res.sites[2], res.sites[4]
    # the reset then hands q2 on as a fresh |0>
    after_reset = run(c.with_instructions(c.instructions[:5]), n_max=3).final.state_of(2)
    slice_ok = (
        m.group == (0,) and same_up_to_phase(m.state.to_vector(), plus)
        and r.group == (2,) and same_up_to_phase(r.state.to_vector(), plus)
        and after_reset is not TOP and after_reset.amps == {"0": 1.0}
    )
    record(4, bad == 0 and three and slice_ok,
           f"{500 - bad}/500 static circuits match, three-group split={three}, "
           f"|+0+> slice and reset={slice_ok}")


def _suite_rows():
    n_max = PassConfig().n_max
    sweep = [1, 2, 4, 8, 16, 2**n_max, 4 * 2**n_max]
    rows, aggs = bench.run_bench([1], sweep, 10, seed=SEED)
    return n_max, sweep, rows, aggs


@pytest.fixture(scope="module")
def suite_rows():
    return _suite_rows()


def test_criterion_5_monotonicity_and_saturation(suite_rows):
    n_max, sweep, rows, aggs = suite_rows
    by_n = {a.n_pcm: a for a in aggs}
    main = [1, 2, 4, 8, 16]
    removed = [by_n[n].removed for n in main]
    gates = [by_n[n].introduced_gates for n in main]
    try:
        bench.check_monotone(rows)
        per_circuit = True
    except bench.MonotonicityError:
        per_circuit = False
    saturated = by_n[2**n_max].removed == by_n[4 * 2**n_max].removed
    ok = removed == sorted(removed) and gates == sorted(gates) and per_circuit and saturated
    record(5, ok, f"removed {removed}, gates {gates} over n_pcm {main}; "
                  f"n_pcm {2**n_max} vs {4 * 2**n_max}: "
                  f"{by_n[2**n_max].removed} vs {by_n[4 * 2**n_max].removed}")


def test_criterion_6_baseline_dominance(suite_rows):
    _, _, _, aggs = suite_rows
    first = next(a for a in aggs if a.n_pcm == 1)
    ratio = first.removed / first.baseline_removed if first.baseline_removed else math.inf
    record(6, first.removed >= first.baseline_removed,
           f"PCM n_pcm=1 removes {first.removed} ({first.removal_pct:.2f}%), baselines "
           f"{first.baseline_removed} ({first.baseline_pct:.2f}%), ratio {ratio:.2f}x")


def test_criterion_7_synthesis_quality():
    rng = np.random.default_rng(SEED)
    worst_prep, worst_tr, worst_ratio = 1.0, 1.0, 0.0
    for n in range(1, 7):
        for _ in range(200):
            psi, phi = random_state(rng, n), random_state(rng, n)
            prep = state_prep(psi)
            worst_prep = min(worst_prep, fidelity(circuit_state(prep), psi))
            worst_ratio = max(worst_ratio, len(prep) / 2**n)
            t = transform(psi, phi)
            worst_tr = min(worst_tr, fidelity(circuit_state(t, psi), phi))
    ok = worst_prep >= 1 - 1e-10 and worst_ratio <= GATE_COUNT_CONSTANT and worst_tr >= 1 - 1e-9
    record(7, ok, f"min prep fidelity 1-{1 - worst_prep:.1e}, max gates/2^n {worst_ratio:.3f} "
                  f"(c={GATE_COUNT_CONSTANT}), min transform fidelity 1-{1 - worst_tr:.1e}")


def test_criterion_8_probabilistic_shots():
    c = four_branch_circuit()
    gate = c.instructions[1]
    rng = np.random.default_rng(SEED)
    shots = 100_000
    counts = [0] * len(gate.branches)
    lookup = {br.ops: i for i, br in enumerate(gate.branches)}
    for _ in range(shots):
        compiled, _ = compile_shot(c, rng)
        counts[lookup[compiled.instructions[1:]]] += 1
    freqs = [k / shots for k in counts]
    err = max(abs(f - br.prob) for f, br in zip(freqs, gate.branches))
    record(8, err <= 0.01, f"frequencies {[round(f, 4) for f in freqs]}, max error {err:.4f}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
