"""Hand-built circuits used by the demos and the acceptance suite."""

from __future__ import annotations

import math

from dyncirc.circuit import Branch, Circuit, CondGate, Gate, Measure, ProbGate, Reset
from dyncirc.synth import invert


def prob_chain_circuit() -> Circuit:
    """One qubit: X with probability 0.4, Y with probability 0.6, then Z."""
    x = ProbGate((0,), (Branch((Gate("x", (0,)),), 0.4), Branch((), 0.6)))
    y = ProbGate((0,), (Branch((Gate("y", (0,)),), 0.6), Branch((), 0.4)))
    return Circuit(1, 0, (x, y, Gate("z", (0,))))


def four_branch_circuit() -> Circuit:
    """S on wire 0, then a four-branch probabilistic gate over two wires."""
    pg = ProbGate(
        (0, 1),
        (
            Branch((Gate("h", (0,)),), 0.1),
            Branch((Gate("x", (1,)),), 0.2),
            Branch((Gate("z", (0,)), Gate("z", (1,))), 0.3),
            Branch((Gate("x", (0,)), Gate("y", (1,))), 0.4),
        ),
    )
    return Circuit(2, 0, (Gate("s", (0,)), pg))


def opaque_three_qubit_block() -> tuple[Gate, ...]:
    """A fixed entangling three-qubit unitary standing in for a generic ``U``."""
    return (
        Gate("cx", (0, 1)),
        Gate("ry", (2,), (0.3,)),
        Gate("cx", (1, 2)),
        Gate("rz", (0,), (1.1,)),
        Gate("ccx", (0, 1, 2)),
        Gate("u", (1,), (0.4, 0.2, 0.7)),
        Gate("cz", (2, 0)),
    )


def measure_reset_circuit(block: tuple[Gate, ...] | None = None) -> Circuit:
    """Measure |+> on wire 0 (controlling a Y on wire 1), reset |+> on wire 2, then ``U``."""
    block = opaque_three_qubit_block() if block is None else block
    return Circuit(
        3,
        1,
        (
            Gate("h", (0,)),
            Gate("h", (2,)),
            Measure(0, 0),
            CondGate(0, 1, Gate("y", (1,))),
            Reset(2),
            *block,
        ),
    )


def disentangle_circuit() -> Circuit:
    """H on three wires, an entangling block and its inverse: ends in |+++>."""
    block = Circuit(3, 0, opaque_three_qubit_block())
    hs = tuple(Gate("h", (q,)) for q in range(3))
    return Circuit(3, 0, hs + block.instructions + invert(block).instructions)


def bv_reuse(secret: str) -> Circuit:
    """Bernstein-Vazirani on two wires with the query wire measured and reused.

    Wire 1 is the oracle target prepared in |->; for each secret bit wire 0 is
    put in |+>, hit by a CX onto wire 1 if the bit is 1, rotated back, measured
    into clbit ``i`` and reset.
    """
    if not secret or set(secret) - {"0", "1"}:
        raise ValueError(f"secret must be a non-empty bitstring, got {secret!r}")
    ins: list = [Gate("h", (1,)), Gate("z", (1,))]
    last = len(secret) - 1
    for i, bit in enumerate(secret):
        ins.append(Gate("h", (0,)))
        if bit == "1":
            ins.append(Gate("cx", (0, 1)))
        ins.append(Gate("h", (0,)))
        if i == last:
            ins.append(Gate("h", (1,)))
        ins.append(Measure(0, i))
        ins.append(Reset(0))
    return Circuit(2, len(secret), tuple(ins))


def plus_state(n: int = 1):
    import numpy as np

    return np.full(2**n, 1 / math.sqrt(2**n), dtype=complex)
