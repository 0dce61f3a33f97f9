"""State preparation and state-to-state transformation synthesis.

The general route is the multiplexor construction: a tree of uniformly
controlled RY rotations sets the amplitude magnitudes, then a cascade of
uniformly controlled RZ rotations realizes the phases as a diagonal unitary.
Each uniformly controlled rotation with ``k`` controls is decomposed with a
Gray-code sequence of ``2**k`` rotations and ``2**k`` CX gates, so an
``n``-qubit preparation never exceeds ``GATE_COUNT_CONSTANT * 2**n`` gates.

States with at most two nonzero amplitudes take a sparse path (one
single-qubit preparation plus a CX/X chain). Global phase is never tracked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dyncirc.circuit import Circuit, Gate
from dyncirc.gates import adjoint

NORM_ATOL = 1e-9
ZERO_AMP = 1e-12
ANGLE_EPS = 1e-14
DEFAULT_CAP = 12
# RY tree + RZ cascade: each level k costs at most 2**(k+1) gates
GATE_COUNT_CONSTANT = 4


class InvalidState(ValueError):
    """Target state is not a normalized vector of length 2**n."""


class SynthesisCapExceeded(ValueError):
    """Target state has more qubits than the configured synthesis cap."""


class NotUnitary(ValueError):
    """Circuit contains a non-unitary instruction and cannot be inverted."""


@dataclass(frozen=True)
class TargetState:
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.size == 0 or vec.size & (vec.size - 1):
            raise InvalidState(f"length {vec.size} is not a power of two")
        norm = float(np.vdot(vec, vec).real)
        if not math.isfinite(norm) or abs(norm - 1.0) > NORM_ATOL:
            raise InvalidState(f"state has squared norm {norm}")
        object.__setattr__(self, "amplitudes", vec)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1


def as_target(state) -> TargetState:
    return state if isinstance(state, TargetState) else TargetState(state)


def _single_qubit_prep(u: complex, v: complex, q: int) -> list[Gate]:
    """Gates taking |0> to u|0> + v|1> (up to global phase) on wire ``q``."""
    au, av = abs(u), abs(v)
    if av < ZERO_AMP:
        return []
    if au < ZERO_AMP:
        return [Gate("x", (q,))]
    if abs(au - av) < 1e-12:
        rel = v / u
        for target, gates in (
            (1, ["h"]),
            (-1, ["x", "h"]),
            (1j, ["h", "s"]),
            (-1j, ["h", "sdg"]),
        ):
            if abs(rel - target) < 1e-12:
                return [Gate(name, (q,)) for name in gates]
    out = [Gate("ry", (q,), (2.0 * math.atan2(av, au),))]
    phase = float(np.angle(v) - np.angle(u))
    phase = math.remainder(phase, 2 * math.pi)
    if abs(phase) > ANGLE_EPS:
        out.append(Gate("rz", (q,), (phase,)))
    return out


def _sparse_prep(amps: np.ndarray, n: int) -> list[Gate]:
    support = [i for i in range(amps.size) if abs(amps[i]) >= ZERO_AMP]
    bits = [format(i, f"0{n}b") for i in support]
    if len(support) == 1:
        return [Gate("x", (q,)) for q, b in enumerate(bits[0]) if b == "1"]
    a, b = bits
    ua, ub = amps[support[0]], amps[support[1]]
    pivot = next(q for q in range(n) if a[q] != b[q])
    if a[pivot] == "1":
        a, b, ua, ub = b, a, ub, ua
    gates = _single_qubit_prep(ua, ub, pivot)
    for q in range(n):
        if q == pivot:
            continue
        if a[q] == b[q]:
            if a[q] == "1":
                gates.append(Gate("x", (q,)))
        else:
            gates.append(Gate("cx", (pivot, q)))
            if a[q] == "1":
                gates.append(Gate("x", (q,)))
    return gates


def multiplexed_rotation(
    axis: str, angles: Sequence[float], controls: Sequence[int], target: int
) -> list[Gate]:
    """Uniformly controlled rotation ``R_axis(angles[j])`` on ``target``.

    ``j`` is the control register value with ``controls[0]`` as its most
    significant bit.
    """
    k = len(controls)
    theta = np.asarray(angles, dtype=float)
    if theta.size != 2**k:
        raise ValueError("need one angle per control configuration")
    name = "r" + axis
    if np.all(np.abs(theta - theta[0]) < ANGLE_EPS):
        if abs(theta[0]) < ANGLE_EPS:
            return []
        return [Gate(name, (target,), (float(theta[0]),))]
    size = 2**k
    gray = [i ^ (i >> 1) for i in range(size)]
    signs = np.array(
        [[(-1) ** bin(j & g).count("1") for g in gray] for j in range(size)], dtype=float
    )
    alpha = signs.T @ theta / size
    gates: list[Gate] = []
    for i in range(size):
        if abs(alpha[i]) > ANGLE_EPS:
            gates.append(Gate(name, (target,), (float(alpha[i]),)))
        changed = gray[i] ^ gray[(i + 1) % size]
        ctrl = controls[k - changed.bit_length()]
        gates.append(Gate("cx", (ctrl, target)))
    return gates


def _dense_prep(amps: np.ndarray, n: int) -> list[Gate]:
    mags = np.abs(amps)
    mags = np.where(mags < ZERO_AMP, 0.0, mags)
    phases = np.where(mags > 0.0, np.angle(amps), 0.0)
    if n == 1:
        return _single_qubit_prep(amps[0], amps[1], 0)
    gates: list[Gate] = []
    for k in range(n):
        block = mags.reshape(2**k, 2, 2 ** (n - k - 1))
        a0 = np.linalg.norm(block[:, 0, :], axis=1)
        a1 = np.linalg.norm(block[:, 1, :], axis=1)
        theta = 2.0 * np.arctan2(a1, a0)
        gates.extend(multiplexed_rotation("y", theta, list(range(k)), k))
    ph = phases
    for t in range(n - 1, -1, -1):
        even, odd = ph[0::2], ph[1::2]
        gates.extend(multiplexed_rotation("z", odd - even, list(range(t)), t))
        ph = (even + odd) / 2.0
    return gates


def state_prep(state, cap: int = DEFAULT_CAP) -> Circuit:
    """Static, ancilla-free circuit ``C`` with ``C|0...0> = |state>`` up to phase."""
    target = as_target(state)
    n = target.n_qubits
    if n > cap:
        raise SynthesisCapExceeded(f"{n} qubits exceeds the synthesis cap of {cap}")
    amps = target.amplitudes
    size = int(np.count_nonzero(np.abs(amps) >= ZERO_AMP))
    if size <= 2:
        gates = _sparse_prep(amps, n)
    else:
        gates = _dense_prep(amps, n)
    return Circuit(n, 0, tuple(gates))


def invert(circuit: Circuit) -> Circuit:
    """Adjoint circuit: reversed order, every gate replaced by its inverse."""
    out = []
    for ins in reversed(circuit.instructions):
        if not isinstance(ins, Gate):
            raise NotUnitary(f"cannot invert {type(ins).__name__}")
        name, params = adjoint(ins.name, ins.params)
        out.append(Gate(name, ins.qubits, params))
    return circuit.with_instructions(out)


def transform(source, target, cap: int = DEFAULT_CAP) -> Circuit:
    """Static circuit mapping ``source`` to ``target`` (up to global phase).

    Built as the inverse preparation of ``source`` followed by the
    preparation of ``target``.
    """
    src, dst = as_target(source), as_target(target)
    if src.n_qubits != dst.n_qubits:
        raise InvalidState(
            f"dimension mismatch: {src.n_qubits} vs {dst.n_qubits} qubit(s)"
        )
    undo = invert(state_prep(src, cap))
    do = state_prep(dst, cap)
    return undo.with_instructions(undo.instructions + do.instructions)
