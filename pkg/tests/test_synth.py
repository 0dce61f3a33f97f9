from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyncirc.circuit import Circuit, Gate, Measure
from dyncirc.sim import circuit_state, fidelity
from dyncirc.synth import (
    GATE_COUNT_CONSTANT,
    InvalidState,
    NotUnitary,
    SynthesisCapExceeded,
    invert,
    multiplexed_rotation,
    state_prep,
    transform,
)
from dyncirc.gates import unitary_of

from helpers import oracle_state, random_state, random_static, static_circuits

S2 = 1 / math.sqrt(2)


def _apply(circuit: Circuit, psi: np.ndarray) -> np.ndarray:
    return circuit_state(circuit, psi)


def test_zero_state_needs_no_gates():
    assert len(state_prep([1, 0, 0, 0])) == 0


def test_plus_is_single_hadamard():
    assert state_prep([S2, S2]).instructions == (Gate("h", (0,)),)


@pytest.mark.parametrize(
    "vec, names",
    [
        ([S2, -S2], ["x", "h"]),
        ([S2, 1j * S2], ["h", "s"]),
        ([S2, -1j * S2], ["h", "sdg"]),
        ([0, 1], ["x"]),
    ],
)
def test_single_qubit_clifford_preps(vec, names):
    c = state_prep(vec)
    assert [g.name for g in c] == names
    assert fidelity(oracle_state(c), np.array(vec)) == pytest.approx(1.0, abs=1e-12)


def test_ghz3():
    ghz = np.zeros(8, dtype=complex)
    ghz[0] = ghz[7] = S2
    c = state_prep(ghz)
    assert fidelity(oracle_state(c), ghz) >= 1 - 1e-10
    assert [g.name for g in c] == ["h", "cx", "cx"]


def test_invert_examples():
    h = Circuit(1, 0, (Gate("h", (0,)),))
    assert invert(h) == h
    c = Circuit(2, 0, (Gate("s", (0,)), Gate("cx", (0, 1))))
    assert invert(c).instructions == (Gate("cx", (0, 1)), Gate("sdg", (0,)))


def test_invert_rejects_dynamic():
    with pytest.raises(NotUnitary):
        invert(Circuit(1, 1, (Measure(0, 0),)))


@settings(max_examples=100, deadline=None)
@given(static_circuits(max_qubits=4, max_gates=10))
def test_invert_is_involution(c):
    assert invert(invert(c)) == c


def test_circuit_times_inverse_is_identity():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        c = random_static(rng, n, 12)
        both = c.with_instructions(c.instructions + invert(c).instructions)
        psi = random_state(rng, n)
        assert fidelity(_apply(both, psi), psi) == pytest.approx(1.0, abs=1e-9)


def test_transform_one_to_zero():
    t = transform([0, 1], [1, 0])
    assert abs(_apply(t, np.array([0, 1], complex))[0]) == pytest.approx(1.0)


def test_transform_plus_minus_to_zero():
    pm = np.kron([S2, S2], [S2, -S2])
    t = transform(pm, [1, 0, 0, 0])
    assert fidelity(_apply(t, pm), np.array([1, 0, 0, 0])) == pytest.approx(1.0, abs=1e-12)


def test_transform_identity_on_same_state():
    rng = np.random.default_rng(3)
    psi = random_state(rng, 3)
    assert fidelity(_apply(transform(psi, psi), psi), psi) >= 1 - 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_prep_and_transform_property(n, seed):
    rng = np.random.default_rng(seed)
    psi, phi = random_state(rng, n), random_state(rng, n)
    prep = state_prep(psi)
    assert prep.is_static()
    assert len(prep) <= GATE_COUNT_CONSTANT * 2**n
    assert fidelity(oracle_state(prep), psi) >= 1 - 1e-10
    assert fidelity(_apply(transform(psi, phi), psi), phi) >= 1 - 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_sparse_states(n, seed, size):
    rng = np.random.default_rng(seed)
    support = rng.choice(2**n, size=min(size, 2**n), replace=False)
    psi = np.zeros(2**n, dtype=complex)
    psi[support] = rng.normal(size=support.size) + 1j * rng.normal(size=support.size)
    psi /= np.linalg.norm(psi)
    assert fidelity(oracle_state(state_prep(psi)), psi) >= 1 - 1e-10


def test_multiplexed_rotation_matches_block_diagonal():
    rng = np.random.default_rng(5)
    for axis in ("y", "z"):
        angles = rng.uniform(-math.pi, math.pi, 4)
        gates = multiplexed_rotation(axis, angles, [0, 1], 2)
        c = Circuit(3, 0, tuple(gates))
        for ctrl in range(4):
            psi = np.zeros(8, dtype=complex)
            psi[ctrl * 2] = 1.0
            out = _apply(c, psi)
            expect = np.zeros(8, dtype=complex)
            expect[ctrl * 2 : ctrl * 2 + 2] = unitary_of("r" + axis, (angles[ctrl],))[:, 0]
            assert fidelity(out, expect) == pytest.approx(1.0, abs=1e-12)


def test_bad_inputs():
    with pytest.raises(InvalidState):
        state_prep([1, 1])
    with pytest.raises(InvalidState):
        state_prep([1, 0, 0])
    with pytest.raises(InvalidState):
        transform([1, 0], [1, 0, 0, 0])
    with pytest.raises(SynthesisCapExceeded):
        state_prep(np.eye(2**5)[0], cap=4)
