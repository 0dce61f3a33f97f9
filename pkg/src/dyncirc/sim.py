"""Exact reference simulator for dynamic and probabilistic circuits.

:func:`enumerate_branches` expands every measurement, reset and probabilistic
gate into weighted branches, which makes it the ground truth for all
equivalence checks in the package. :func:`sample` runs single trajectories
shot by shot and works beyond the enumeration limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from dyncirc.circuit import (
    Circuit,
    CondGate,
    Gate,
    Measure,
    ProbGate,
    Reset,
    compile_shot,
)
from dyncirc.gates import unitary_of

MAX_QUBITS = 14
MAX_BRANCHES = 2**20
PRUNE = 1e-12


class TooLarge(RuntimeError):
    """Circuit exceeds the enumeration limits."""


@dataclass(frozen=True)
class BranchOutcome:
    clbits: str
    probability: float
    final_state: np.ndarray


@lru_cache(maxsize=4096)
def _gate_tensor(name: str, params: tuple[float, ...]) -> np.ndarray:
    u = unitary_of(name, params)
    k = u.shape[0].bit_length() - 1
    return u.reshape((2,) * (2 * k))


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_gate(state: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    """Apply a gate to a statevector (qubit 0 is the most significant bit)."""
    k = len(gate.qubits)
    t = state.reshape((2,) * n_qubits)
    u = _gate_tensor(gate.name, gate.params)
    out = np.tensordot(u, t, axes=(list(range(k, 2 * k)), list(gate.qubits)))
    out = np.moveaxis(out, list(range(k)), list(gate.qubits))
    return out.reshape(-1)


def apply_gates(state: np.ndarray, gates, n_qubits: int) -> np.ndarray:
    for g in gates:
        state = apply_gate(state, g, n_qubits)
    return state


def circuit_state(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Final statevector of a static circuit."""
    if not circuit.is_static():
        raise ValueError("circuit_state needs a static circuit")
    psi = zero_state(circuit.n_qubits) if initial is None else np.asarray(initial, complex)
    return apply_gates(psi, circuit.instructions, circuit.n_qubits)


def _project(state: np.ndarray, qubit: int, n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    t = state.reshape((2,) * n_qubits)
    zero = t.copy()
    one = t.copy()
    idx0 = [slice(None)] * n_qubits
    idx1 = [slice(None)] * n_qubits
    idx0[qubit] = 0
    idx1[qubit] = 1
    zero[tuple(idx1)] = 0
    one[tuple(idx0)] = 0
    return zero.reshape(-1), one.reshape(-1)


def _flip(state: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    return np.flip(state.reshape((2,) * n_qubits), axis=qubit).reshape(-1)


def _born_split(state: np.ndarray, qubit: int, n_qubits: int):
    """Yield ``(outcome, probability, normalized post-state)`` for both outcomes."""
    parts = _project(state, qubit, n_qubits)
    for outcome, part in enumerate(parts):
        p = float(np.vdot(part, part).real)
        if p > PRUNE:
            yield outcome, p, part / math.sqrt(p)


def enumerate_branches(circuit: Circuit, max_branches: int = MAX_BRANCHES) -> list[BranchOutcome]:
    """Expand a circuit into all classical branches with Born weights.

    Branches are explored depth first, outcome 0 before outcome 1 and
    probabilistic branches in declaration order, so the result order is
    deterministic. Zero-probability branches (below 1e-12) are pruned.
    """
    n = circuit.n_qubits
    if n > MAX_QUBITS:
        raise TooLarge(f"{n} qubits exceeds the enumeration limit of {MAX_QUBITS}")
    instrs = circuit.instructions
    results: list[BranchOutcome] = []
    # stack entries: (pc, state, clbits, probability)
    stack = [(0, zero_state(n), (0,) * circuit.n_clbits, 1.0)]
    spawned = 1
    while stack:
        pc, psi, cl, prob = stack.pop()
        while pc < len(instrs):
            ins = instrs[pc]
            pc += 1
            if isinstance(ins, Gate):
                psi = apply_gate(psi, ins, n)
            elif isinstance(ins, CondGate):
                if cl[ins.clbit] == ins.value:
                    psi = apply_gate(psi, ins.gate, n)
            elif isinstance(ins, (Measure, Reset)):
                children = []
                for outcome, p, post in _born_split(psi, ins.qubit, n):
                    if isinstance(ins, Measure):
                        ncl = cl[: ins.clbit] + (outcome,) + cl[ins.clbit + 1 :]
                    else:
                        ncl = cl
                        if outcome:
                            post = _flip(post, ins.qubit, n)
                    children.append((pc, post, ncl, prob * p))
                spawned += len(children) - 1
                if spawned > max_branches:
                    raise TooLarge(f"more than {max_branches} branches")
                # push in reverse so outcome 0 is explored first
                for child in reversed(children[1:]):
                    stack.append(child)
                _, psi, cl, prob = children[0]
            elif isinstance(ins, ProbGate):
                children = []
                for br in ins.branches:
                    if br.prob <= PRUNE:
                        continue
                    ncl = list(cl)
                    for c, b in br.writes:
                        ncl[c] = b
                    children.append((pc, apply_gates(psi, br.ops, n), tuple(ncl), prob * br.prob))
                spawned += len(children) - 1
                if spawned > max_branches:
                    raise TooLarge(f"more than {max_branches} branches")
                for child in reversed(children[1:]):
                    stack.append(child)
                _, psi, cl, prob = children[0]
            else:  # pragma: no cover
                raise TypeError(f"unknown instruction {ins!r}")
        results.append(BranchOutcome("".join(map(str, cl)), prob, psi))
    return results


def distribution(circuit: Circuit) -> dict[str, float]:
    """Exact distribution over final classical records (clbit 0 first)."""
    dist: dict[str, float] = {}
    for br in enumerate_branches(circuit):
        dist[br.clbits] = dist.get(br.clbits, 0.0) + br.probability
    return dict(sorted(dist.items()))


def tvd(a: dict[str, float], b: dict[str, float]) -> float:
    """Total variation distance between two outcome distributions."""
    keys = set(a) | set(b)
    return 0.5 * math.fsum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def conditional_states(branches: list[BranchOutcome]) -> dict[str, np.ndarray]:
    """Probability-weighted density matrix of the quantum register per classical record."""
    out: dict[str, np.ndarray] = {}
    for br in branches:
        rho = br.probability * np.outer(br.final_state, br.final_state.conj())
        if br.clbits in out:
            out[br.clbits] = out[br.clbits] + rho
        else:
            out[br.clbits] = rho
    return out


def states_match(a: Circuit, b: Circuit, atol: float = 1e-9) -> bool:
    """True when both circuits give the same weighted quantum state per classical record.

    Comparing weighted density matrices makes the check insensitive to global
    phase and to how a mixture is split into branches.
    """
    sa = conditional_states(enumerate_branches(a))
    sb = conditional_states(enumerate_branches(b))
    for key in set(sa) | set(sb):
        dim = 2 ** max(a.n_qubits, b.n_qubits)
        ra = sa.get(key, np.zeros((dim, dim)))
        rb = sb.get(key, np.zeros((dim, dim)))
        if ra.shape != rb.shape or not np.allclose(ra, rb, rtol=0.0, atol=atol):
            return False
    return True


def fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    return float(abs(np.vdot(psi, phi)) ** 2)


def run_trajectory(circuit: Circuit, rng: np.random.Generator) -> str:
    """Simulate one shot of a circuit without probabilistic gates."""
    n = circuit.n_qubits
    psi = zero_state(n)
    cl = [0] * circuit.n_clbits
    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            psi = apply_gate(psi, ins, n)
        elif isinstance(ins, CondGate):
            if cl[ins.clbit] == ins.value:
                psi = apply_gate(psi, ins.gate, n)
        elif isinstance(ins, (Measure, Reset)):
            zero, one = _project(psi, ins.qubit, n)
            p1 = float(np.vdot(one, one).real)
            outcome = 1 if rng.random() < p1 else 0
            post = one if outcome else zero
            psi = post / math.sqrt(p1 if outcome else 1.0 - p1)
            if isinstance(ins, Measure):
                cl[ins.clbit] = outcome
            elif outcome:
                psi = _flip(psi, ins.qubit, n)
        else:
            raise TypeError(f"unexpected instruction {ins!r} in a compiled shot")
    return "".join(map(str, cl))


def sample(circuit: Circuit, shots: int, seed: int | None = None) -> dict[str, float]:
    """Empirical outcome distribution from ``shots`` independent shots.

    Every shot compiles the probabilistic gates afresh and then runs one
    trajectory with sampled measurement outcomes.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(seed)
    has_prob = any(isinstance(ins, ProbGate) for ins in circuit.instructions)
    counts: dict[str, int] = {}
    for _ in range(shots):
        if has_prob:
            compiled, presets = compile_shot(circuit, rng)
        else:
            compiled, presets = circuit, {}
        bits = run_trajectory(compiled, rng)
        if presets:
            lst = list(bits)
            for c, b in presets.items():
                lst[c] = str(b)
            bits = "".join(lst)
        counts[bits] = counts.get(bits, 0) + 1
    return {k: v / shots for k, v in sorted(counts.items())}
