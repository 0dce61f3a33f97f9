from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyncirc.circuit import CondGate, Gate, Measure, Reset, circuit_depth, count_dynamic_ops
from dyncirc.qasm import serialize
from dyncirc.randgen import GenConfig, generate, generate_suite


def test_scale_three_size():
    c = generate(GenConfig(scale=3, seed=1))
    assert c.n_qubits == 30
    assert circuit_depth(c) == 600


def test_static_when_densities_zero():
    c = generate(GenConfig(meas_density=0, reset_density=0, seed=4))
    m, r, _ = count_dynamic_ops(c)
    assert (m, r) == (0, 0)
    assert not any(isinstance(i, CondGate) for i in c)


def test_seed_determinism():
    a = serialize(generate(GenConfig(scale=1, seed=9)))
    b = serialize(generate(GenConfig(scale=1, seed=9)))
    assert a == b
    assert a != serialize(generate(GenConfig(scale=1, seed=10)))


def test_suite_shape():
    suite = generate_suite(1, 10, seed=0)
    assert len(suite) == 10
    assert all(c.n_qubits == 10 and circuit_depth(c) == 200 for c in suite)
    assert len({serialize(c) for c in suite}) == 10


def test_small_explicit_suite():
    suite = generate_suite(None, 200, 3, n_qubits=4, depth=30)
    assert len(suite) == 200
    assert all(c.n_qubits == 4 for c in suite)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 80), st.floats(0, 1), st.floats(0, 1),
       st.floats(0, 1), st.integers(0, 2**31))
def test_depth_within_ten_percent(n, depth, meas, cond, reset, seed):
    c = generate(GenConfig(n_qubits=n, depth=depth, meas_density=meas, cond_density=cond,
                           reset_density=reset, seed=seed))
    assert abs(circuit_depth(c) - depth) <= 0.1 * depth
    for ins in c:
        assert isinstance(ins, (Gate, Measure, Reset, CondGate))


def test_conditionals_follow_their_measurement():
    c = generate(GenConfig(scale=1, meas_density=0.3, cond_density=1.0, seed=2))
    written = set()
    n_cond = 0
    for ins in c:
        if isinstance(ins, Measure):
            written.add(ins.clbit)
        elif isinstance(ins, CondGate):
            assert ins.clbit in written
            n_cond += 1
    assert n_cond > 0


def test_arity_mix_is_roughly_five_four_one():
    c = generate(GenConfig(scale=2, meas_density=0, reset_density=0, seed=0))
    qubit_slots = {1: 0, 2: 0, 3: 0}
    for g in c:
        qubit_slots[len(g.qubits)] += 1
    total = sum(qubit_slots.values())
    assert qubit_slots[1] / total > qubit_slots[2] / total > qubit_slots[3] / total > 0


def test_bad_configs():
    with pytest.raises(ValueError):
        GenConfig(meas_density=1.5)
    with pytest.raises(ValueError):
        GenConfig(scale=0)
    with pytest.raises(ValueError):
        generate_suite(1, 0)
