"""Shared strategies and an independent dense oracle for the test suite."""

from __future__ import annotations

import math

import numpy as np
from hypothesis import strategies as st

from dyncirc.circuit import Circuit, Gate
from dyncirc.gates import ALPHABET, unitary_of

GATE_NAMES = sorted(ALPHABET)


def full_matrix(gate: Gate, n: int) -> np.ndarray:
    """Dense ``2**n`` operator of ``gate``, built column by column from basis states."""
    u = unitary_of(gate.name, gate.params)
    k = len(gate.qubits)
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub = 0
        for q in gate.qubits:
            sub = (sub << 1) | bits[q]
        for row_sub in range(2**k):
            amp = u[row_sub, sub]
            if amp == 0:
                continue
            nb = list(bits)
            for j, q in enumerate(gate.qubits):
                nb[q] = (row_sub >> (k - 1 - j)) & 1
            row = int("".join(map(str, nb)), 2) if n else 0
            out[row, col] += amp
    return out


def oracle_state(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    for g in circuit.instructions:
        psi = full_matrix(g, n) @ psi
    return psi


def same_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    return abs(abs(np.vdot(a, b)) - 1.0) <= atol and math.isclose(
        np.linalg.norm(a), np.linalg.norm(b), abs_tol=atol
    )


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


@st.composite
def gates(draw, n_qubits: int) -> Gate:
    candidates = [g for g in GATE_NAMES if ALPHABET[g].arity <= n_qubits]
    name = draw(st.sampled_from(candidates))
    spec = ALPHABET[name]
    qubits = draw(st.permutations(range(n_qubits)))[: spec.arity]
    angle = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
    params = tuple(draw(angle) for _ in range(spec.n_params))
    return Gate(name, tuple(qubits), params)


@st.composite
def static_circuits(draw, max_qubits: int = 4, max_gates: int = 12) -> Circuit:
    n = draw(st.integers(1, max_qubits))
    ops = draw(st.lists(gates(n), max_size=max_gates))
    return Circuit(n, 0, tuple(ops))


def random_static(rng: np.random.Generator, n: int, length: int) -> Circuit:
    ops = []
    for _ in range(length):
        name = GATE_NAMES[int(rng.integers(len(GATE_NAMES)))]
        spec = ALPHABET[name]
        if spec.arity > n:
            name, spec = "h", ALPHABET["h"]
        qubits = tuple(int(q) for q in rng.permutation(n)[: spec.arity])
        params = tuple(rng.uniform(-math.pi, math.pi, spec.n_params))
        ops.append(Gate(name, qubits, params))
    return Circuit(n, 0, tuple(ops))
