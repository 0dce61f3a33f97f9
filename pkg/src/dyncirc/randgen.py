"""Seeded random dynamic-circuit generator.

Circuits are built layer by layer. Every layer covers all qubits with random
1-3 qubit gates (arity weights 5:4:1), so the circuit depth equals the number
of layers. A layer receives a mid-circuit measurement with probability
``meas_density`` and a reset with probability ``reset_density``; each
measurement writes a fresh clbit and, with probability ``cond_density``, the
following layers carry a block of 1-3 gates conditioned on that clbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dyncirc.circuit import Circuit, CondGate, Gate, Instruction, Measure, Reset
from dyncirc.gates import ALPHABET

ONE_QUBIT = [n for n, s in ALPHABET.items() if s.arity == 1]
TWO_QUBIT = [n for n, s in ALPHABET.items() if s.arity == 2]
THREE_QUBIT = [n for n, s in ALPHABET.items() if s.arity == 3]
ARITY_WEIGHTS = (5, 4, 1)


@dataclass(frozen=True)
class GenConfig:
    scale: int | None = 1
    n_qubits: int | None = None
    depth: int | None = None
    meas_density: float = 0.05
    cond_density: float = 0.5
    reset_density: float = 0.03
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("meas_density", "cond_density", "reset_density"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.n_qubits is None or self.depth is None:
            if self.scale is None or self.scale < 1:
                raise ValueError("give a positive scale or explicit n_qubits and depth")
        elif self.n_qubits < 1 or self.depth < 0:
            raise ValueError("n_qubits must be positive and depth non-negative")

    @property
    def size(self) -> tuple[int, int]:
        if self.n_qubits is not None and self.depth is not None:
            return self.n_qubits, self.depth
        return self.scale * 10, self.scale * 200


def _random_gate(rng: np.random.Generator, qubits: list[int]) -> Gate:
    pool = {1: ONE_QUBIT, 2: TWO_QUBIT, 3: THREE_QUBIT}[len(qubits)]
    name = pool[int(rng.integers(len(pool)))]
    params = tuple(rng.uniform(0.0, 2 * math.pi, ALPHABET[name].n_params))
    return Gate(name, tuple(qubits), params)


def _arity(rng: np.random.Generator, remaining: int) -> int:
    allowed = [a for a in (1, 2, 3) if a <= remaining]
    w = np.array([ARITY_WEIGHTS[a - 1] for a in allowed], dtype=float)
    return int(rng.choice(allowed, p=w / w.sum()))


def generate(cfg: GenConfig) -> Circuit:
    n, depth = cfg.size
    rng = np.random.default_rng(cfg.seed)
    ins: list[Instruction] = []
    n_clbits = 0
    pending: list[tuple[int, int]] = []  # (clbit, remaining conditioned gates)
    for _ in range(depth):
        order = [int(q) for q in rng.permutation(n)]
        special: list[Instruction] = []
        if rng.random() < cfg.meas_density:
            special.append(Measure(order.pop(), n_clbits))
            measured_clbit = n_clbits
            n_clbits += 1
        else:
            measured_clbit = None
        if order and rng.random() < cfg.reset_density:
            special.append(Reset(order.pop()))
        # conditioned gates from earlier measurements occupy slots in this layer
        # at most one per clbit per layer so classical wires add no depth
        still: list[tuple[int, int]] = []
        for clbit, left in pending:
            if not order:
                still.append((clbit, left))
                continue
            k = _arity(rng, len(order))
            gate = _random_gate(rng, [order.pop() for _ in range(k)])
            special.append(CondGate(clbit, int(rng.integers(2)), gate))
            if left > 1:
                still.append((clbit, left - 1))
        pending = still
        while order:
            k = _arity(rng, len(order))
            ins.append(_random_gate(rng, [order.pop() for _ in range(k)]))
        ins.extend(special)
        if measured_clbit is not None and rng.random() < cfg.cond_density:
            pending.append((measured_clbit, int(rng.integers(1, 4))))
    return Circuit(n, n_clbits, tuple(ins))


def generate_suite(
    scale: int | None = 1,
    count: int = 10,
    seed: int = 0,
    *,
    n_qubits: int | None = None,
    depth: int | None = None,
    meas_density: float = 0.05,
    cond_density: float = 0.5,
    reset_density: float = 0.03,
) -> list[Circuit]:
    """``count`` circuits with per-circuit seeds spawned from ``seed``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    seeds = np.random.SeedSequence(seed).generate_state(count)
    return [
        generate(
            GenConfig(
                scale=scale,
                n_qubits=n_qubits,
                depth=depth,
                meas_density=meas_density,
                cond_density=cond_density,
                reset_density=reset_density,
                seed=int(s),
            )
        )
        for s in seeds
    ]
