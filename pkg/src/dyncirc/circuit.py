"""Circuit intermediate representation.

A :class:`Circuit` is an immutable, ordered tuple of instructions over a
quantum and a classical register. Five instruction variants exist:
:class:`Gate`, :class:`Measure`, :class:`Reset`, :class:`CondGate` (a gate
guarded by a single classical bit) and :class:`ProbGate` (a compile-time
random choice between static sub-circuits, each optionally assigning
classical bits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from dyncirc.gates import ALPHABET, check_params

PROB_ATOL = 1e-9


class CircuitError(ValueError):
    """Malformed instruction or circuit."""


class InvalidDistribution(CircuitError):
    """Branch probabilities of a probabilistic gate do not sum to one."""


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        spec = ALPHABET.get(self.name)
        if spec is None:
            raise CircuitError(f"gate {self.name!r} is not in the alphabet")
        qubits = tuple(int(q) for q in self.qubits)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "params", params)
        if len(qubits) != spec.arity:
            raise CircuitError(f"{self.name} acts on {spec.arity} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"duplicate qubits in {self.name} {qubits}")
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {qubits}")
        check_params(self.name, params)


@dataclass(frozen=True)
class Measure:
    qubit: int
    clbit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class Reset:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class CondGate:
    """``gate`` is applied iff classical bit ``clbit`` equals ``value``."""

    clbit: int
    value: int
    gate: Gate

    def __post_init__(self) -> None:
        if not isinstance(self.gate, Gate):
            raise CircuitError("a conditional may only wrap a plain gate")
        if self.value not in (0, 1):
            raise CircuitError(f"condition value must be 0 or 1, got {self.value!r}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.gate.qubits


@dataclass(frozen=True)
class Branch:
    ops: tuple[Gate, ...]
    prob: float
    writes: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "prob", float(self.prob))
        object.__setattr__(
            self, "writes", tuple((int(c), int(b)) for c, b in self.writes)
        )
        for op in self.ops:
            if not isinstance(op, Gate):
                raise CircuitError("probabilistic branches may contain only static gates")
        if not (0.0 <= self.prob <= 1.0) or math.isnan(self.prob):
            raise InvalidDistribution(f"branch probability {self.prob} outside [0, 1]")
        for _, b in self.writes:
            if b not in (0, 1):
                raise CircuitError(f"clbit write value must be 0 or 1, got {b}")


@dataclass(frozen=True)
class ProbGate:
    """Extended probabilistic gate: exactly one branch is instantiated per shot."""

    qubits: tuple[int, ...]
    branches: tuple[Branch, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise InvalidDistribution("probabilistic gate without branches")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"duplicate qubits in probabilistic gate {self.qubits}")
        check_distribution(self.branches)
        allowed = set(self.qubits)
        targets = None
        for br in self.branches:
            for op in br.ops:
                if not allowed.issuperset(op.qubits):
                    raise CircuitError(
                        f"branch gate {op.name}{op.qubits} leaves qubits {self.qubits}"
                    )
            clbits = sorted(c for c, _ in br.writes)
            if len(set(clbits)) != len(clbits):
                raise CircuitError("branch writes the same clbit twice")
            if targets is None:
                targets = clbits
            elif clbits != targets:
                raise CircuitError("branches must write the same set of clbits")

    @property
    def clbits(self) -> tuple[int, ...]:
        return tuple(sorted(c for c, _ in self.branches[0].writes))


Instruction = Union[Gate, Measure, Reset, CondGate, ProbGate]


def check_distribution(branches: Sequence[Branch], atol: float = PROB_ATOL) -> None:
    total = math.fsum(br.prob for br in branches)
    if abs(total - 1.0) > atol:
        raise InvalidDistribution(f"branch probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    n_clbits: int = 0
    instructions: tuple[Instruction, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.n_qubits < 0 or self.n_clbits < 0:
            raise CircuitError("register sizes must be non-negative")
        for pos, ins in enumerate(self.instructions):
            _check_wires(ins, self.n_qubits, self.n_clbits, pos)

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def with_instructions(self, instructions: Iterable[Instruction]) -> Circuit:
        return Circuit(self.n_qubits, self.n_clbits, tuple(instructions))

    def is_static(self) -> bool:
        return all(isinstance(ins, Gate) for ins in self.instructions)


def _check_wires(ins: Instruction, nq: int, nc: int, pos: int) -> None:
    def bad(msg: str) -> CircuitError:
        return CircuitError(f"instruction {pos}: {msg}")

    if isinstance(ins, (Gate, Measure, Reset, CondGate, ProbGate)):
        for q in ins.qubits:
            if not 0 <= q < nq:
                raise bad(f"qubit {q} out of range for {nq} qubit(s)")
    else:
        raise bad(f"unknown instruction {ins!r}")
    clbits: tuple[int, ...] = ()
    if isinstance(ins, Measure):
        clbits = (ins.clbit,)
    elif isinstance(ins, CondGate):
        clbits = (ins.clbit,)
    elif isinstance(ins, ProbGate):
        clbits = ins.clbits
    for c in clbits:
        if not 0 <= c < nc:
            raise bad(f"clbit {c} out of range for {nc} clbit(s)")


def parallel_x(mask: str, qubits: Sequence[int] | None = None) -> list[Gate]:
    """X on every position where ``mask`` has a ``1``.

    ``qubits`` maps mask positions to circuit wires; by default position ``i``
    is wire ``i``.

    >>> [g.qubits for g in parallel_x("101")]
    [(0,), (2,)]
    """
    if qubits is None:
        qubits = range(len(mask))
    if len(qubits) != len(mask):
        raise ValueError("mask and qubit list differ in length")
    if set(mask) - {"0", "1"}:
        raise ValueError(f"mask must be a bitstring, got {mask!r}")
    return [Gate("x", (q,)) for bit, q in zip(mask, qubits) if bit == "1"]


class DynamicCounts(NamedTuple):
    measurements: int
    resets: int
    static_gates: int


def count_dynamic_ops(circuit: Circuit) -> DynamicCounts:
    """Count dynamic operations next to static gates (conditionals are static)."""
    m = r = s = 0
    for ins in circuit.instructions:
        if isinstance(ins, Measure):
            m += 1
        elif isinstance(ins, Reset):
            r += 1
        elif isinstance(ins, (Gate, CondGate)):
            s += 1
    return DynamicCounts(m, r, s)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def choose_branch(gate: ProbGate, rng: np.random.Generator) -> Branch:
    check_distribution(gate.branches)
    cum = np.cumsum([br.prob for br in gate.branches])
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return gate.branches[min(idx, len(gate.branches) - 1)]


def compile_shot(circuit: Circuit, rng) -> tuple[Circuit, dict[int, int]]:
    """Resolve every probabilistic gate for a single shot.

    Each :class:`ProbGate` is replaced by the ops of one branch, drawn with the
    branch probabilities. Clbits written by the chosen branch become
    compile-time presets: conditionals reading such a clbit before it is
    overwritten by a measurement are resolved statically (kept as a plain gate
    or dropped). The returned mapping holds the presets still live at the end
    of the circuit; a simulator overlays them on the final classical record.
    """
    rng = _as_rng(rng)
    out: list[Instruction] = []
    live: dict[int, int] = {}
    for ins in circuit.instructions:
        if isinstance(ins, ProbGate):
            br = choose_branch(ins, rng)
            out.extend(br.ops)
            live.update(br.writes)
        elif isinstance(ins, Measure):
            live.pop(ins.clbit, None)
            out.append(ins)
        elif isinstance(ins, CondGate) and ins.clbit in live:
            if live[ins.clbit] == ins.value:
                out.append(ins.gate)
        else:
            out.append(ins)
    return circuit.with_instructions(out), dict(sorted(live.items()))


def circuit_depth(circuit: Circuit) -> int:
    """Longest dependency chain over quantum and classical wires."""
    qlevel = [0] * circuit.n_qubits
    clevel = [0] * circuit.n_clbits
    for ins in circuit.instructions:
        clbits: tuple[int, ...] = ()
        if isinstance(ins, (Measure, CondGate)):
            clbits = (ins.clbit,)
        elif isinstance(ins, ProbGate):
            clbits = ins.clbits
        level = 1 + max(
            [qlevel[q] for q in ins.qubits] + [clevel[c] for c in clbits], default=0
        )
        for q in ins.qubits:
            qlevel[q] = level
        for c in clbits:
            clevel[c] = level
    return max(qlevel + clevel, default=0)
