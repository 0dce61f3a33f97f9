"""Quantum constant propagation.

Forward abstract interpretation of a circuit starting from ``|0...0>``. The
store is a union-table that partitions qubits into entanglement groups; each
group is either ``TOP`` (nothing known) or a sparse amplitude table over its
members. Groups never grow past ``n_max`` qubits (such merges yield ``TOP``)
and are re-split whenever a member becomes disentangled.

Reset handling comes in two flavours. ``"strict"`` (default) only propagates a
pure post-reset state when the physical reset channel really outputs a pure
state; ``"paper"`` always truncates and renormalizes, even when that is unsound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Union

import numpy as np

from dyncirc.circuit import Circuit, CondGate, Gate, Measure, ProbGate, Reset
from dyncirc.gates import unitary_of

PRUNE = 1e-12
RANK_TOL = 1e-10
PROPORTIONAL_TOL = 1e-9

ResetMode = Literal["strict", "paper"]


class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()


@dataclass(frozen=True)
class AmplitudeTable:
    """Known pure state of one entanglement group.

    ``amps`` maps bitstrings (character ``k`` is the bit of ``qubits[k]``) to
    amplitudes. Tables are never mutated once built.
    """

    qubits: tuple[int, ...]
    amps: Mapping[str, complex]

    @classmethod
    def basis(cls, qubits, bits: str | None = None) -> AmplitudeTable:
        qubits = tuple(qubits)
        return cls(qubits, {bits or "0" * len(qubits): 1.0 + 0j})

    @classmethod
    def from_vector(cls, qubits, vec) -> AmplitudeTable:
        qubits = tuple(qubits)
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        n = len(qubits)
        amps = {
            format(i, f"0{n}b"): complex(a) for i, a in enumerate(vec) if abs(a) >= PRUNE
        }
        return cls(qubits, amps)

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(2 ** len(self.qubits), dtype=complex)
        for bits, a in self.amps.items():
            vec[int(bits, 2) if bits else 0] = a
        return vec

    def size(self) -> int:
        return state_size(self)

    def norm2(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amps.values())


AbstractState = Union[AmplitudeTable, _Top]


def state_size(state: AmplitudeTable) -> int:
    """Number of nonzero computational-basis coefficients."""
    return sum(1 for a in state.amps.values() if abs(a) >= PRUNE)


def _clean(amps: dict[str, complex]) -> dict[str, complex]:
    """Prune tiny amplitudes, then renormalize with a fixed global phase."""
    amps = {k: v for k, v in amps.items() if abs(v) >= PRUNE}
    norm = math.sqrt(math.fsum(abs(v) ** 2 for v in amps.values()))
    if norm == 0.0:
        raise ValueError("amplitude table collapsed to the zero vector")
    lead = amps[min(amps)]
    phase = lead / abs(lead)
    scale = 1.0 / (norm * phase)
    return {k: amps[k] * scale for k in sorted(amps)}


def _canonical(qubits: tuple[int, ...], amps: dict[str, complex]) -> AmplitudeTable:
    return AmplitudeTable(tuple(qubits), _clean(amps))


def tensor(a: AmplitudeTable, b: AmplitudeTable) -> AmplitudeTable:
    """Tensor product with members re-sorted by ascending qubit index."""
    merged = tuple(sorted(a.qubits + b.qubits))
    src = a.qubits + b.qubits
    perm = [src.index(q) for q in merged]
    amps: dict[str, complex] = {}
    for (ka, va), (kb, vb) in itertools.product(a.amps.items(), b.amps.items()):
        joined = ka + kb
        amps["".join(joined[i] for i in perm)] = va * vb
    return AmplitudeTable(merged, amps)


def apply_matrix(table: AmplitudeTable, matrix: np.ndarray, targets) -> AmplitudeTable:
    """Apply a unitary on ``targets`` (first target is the matrix MSB)."""
    pos = [table.qubits.index(q) for q in targets]
    k = len(pos)
    dim = 2**k
    out: dict[str, complex] = {}
    for bits, amp in table.amps.items():
        col = 0
        for p in pos:
            col = (col << 1) | (bits[p] == "1")
        chars = list(bits)
        for row in range(dim):
            coeff = matrix[row, col]
            if coeff == 0:
                continue
            for j, p in enumerate(pos):
                chars[p] = "1" if (row >> (k - 1 - j)) & 1 else "0"
            key = "".join(chars)
            out[key] = out.get(key, 0.0) + coeff * amp
    return _canonical(table.qubits, out)


def try_split(table: AmplitudeTable, tol: float = RANK_TOL) -> list[AmplitudeTable]:
    """Factor disentangled qubits out of a group.

    Each member is tested in turn: the dense vector is reshaped into a
    ``2 x 2**(k-1)`` matrix with that qubit as the row index, and the qubit is
    split off when the second singular value is below ``tol``.
    """
    parts: list[AmplitudeTable] = []
    rest = table
    for q in table.qubits:
        k = len(rest.qubits)
        if k <= 1:
            break
        i = rest.qubits.index(q)
        t = rest.to_vector().reshape((2,) * k)
        mat = np.moveaxis(t, i, 0).reshape(2, -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        if s[1] >= tol:
            continue
        parts.append(_canonical((q,), {"0": u[0, 0], "1": u[1, 0]}))
        others = tuple(x for x in rest.qubits if x != q)
        rest = _canonical(
            others,
            {
                format(j, f"0{k - 1}b"): s[0] * vh[0, j]
                for j in range(vh.shape[1])
                if abs(vh[0, j]) >= PRUNE
            },
        )
    parts.append(rest)
    return sorted(parts, key=lambda t: t.qubits[0])


@dataclass
class _Group:
    qubits: tuple[int, ...]
    state: AbstractState


class UnionTable:
    """Qubit partition into entanglement groups with one abstract state each."""

    def __init__(self, n_qubits: int, n_max: int, reset_mode: ResetMode = "strict"):
        if n_max < 1:
            raise ValueError("n_max must be at least 1")
        if reset_mode not in ("strict", "paper"):
            raise ValueError(f"unknown reset mode {reset_mode!r}")
        self.n_qubits = n_qubits
        self.n_max = n_max
        self.reset_mode = reset_mode
        self._next = n_qubits
        self.group_of = list(range(n_qubits))
        self.groups: dict[int, _Group] = {
            q: _Group((q,), AmplitudeTable.basis((q,))) for q in range(n_qubits)
        }

    # -- queries -----------------------------------------------------------
    def group(self, qubit: int) -> _Group:
        return self.groups[self.group_of[qubit]]

    def state_of(self, qubit: int) -> AbstractState:
        return self.group(qubit).state

    def snapshot(self) -> list[tuple[tuple[int, ...], AbstractState]]:
        return sorted(((g.qubits, g.state) for g in self.groups.values()), key=lambda x: x[0])

    def statevector(self) -> np.ndarray | None:
        """Dense state of the whole register, or ``None`` if any group is TOP."""
        full: AmplitudeTable | None = None
        for _, st in self.snapshot():
            if st is TOP:
                return None
            full = st if full is None else tensor(full, st)
        if full is None:
            return np.ones(1, dtype=complex)
        return full.to_vector()

    # -- bookkeeping -------------------------------------------------------
    def _install(self, qubits, state: AbstractState) -> int:
        gid = self._next
        self._next += 1
        self.groups[gid] = _Group(tuple(qubits), state)
        for q in qubits:
            self.group_of[q] = gid
        return gid

    def _install_split(self, table: AmplitudeTable) -> None:
        if len(table.qubits) == 1:
            self._install(table.qubits, table)
            return
        for part in try_split(table):
            self._install(part.qubits, part)

    def merge(self, qubits) -> _Group:
        """Combine the groups of ``qubits`` into one (TOP if over ``n_max``)."""
        gids = sorted({self.group_of[q] for q in qubits})
        if len(gids) == 1:
            return self.groups[gids[0]]
        parts = [self.groups.pop(g) for g in gids]
        members = tuple(sorted(q for p in parts for q in p.qubits))
        if any(p.state is TOP for p in parts) or len(members) > self.n_max:
            state: AbstractState = TOP
        else:
            state = parts[0].state
            for p in parts[1:]:
                state = tensor(state, p.state)
        gid = self._install(members, state)
        return self.groups[gid]

    def make_top(self, qubits) -> None:
        group = self.merge(qubits)
        group.state = TOP

    # -- transfer functions ------------------------------------------------
    def apply_gate(self, gate: Gate) -> None:
        group = self.merge(gate.qubits)
        if group.state is TOP:
            return
        gid = self.group_of[gate.qubits[0]]
        del self.groups[gid]
        table = apply_matrix(group.state, unitary_of(gate.name, gate.params), gate.qubits)
        self._install_split(table)

    def apply_measure(self, qubit: int) -> int | None:
        """Deterministic outcome if known; otherwise the group becomes TOP."""
        group = self.group(qubit)
        if group.state is TOP:
            return None
        pos = group.qubits.index(qubit)
        seen = {bits[pos] for bits in group.state.amps}
        if len(seen) == 1:
            return int(seen.pop())
        group.state = TOP
        return None

    def _detach_fresh_zero(self, qubit: int) -> None:
        gid = self.group_of[qubit]
        group = self.groups.pop(gid)
        rest = tuple(q for q in group.qubits if q != qubit)
        if rest:
            self._install(rest, group.state)
        self._install((qubit,), AmplitudeTable.basis((qubit,)))

    def apply_reset(self, qubit: int) -> None:
        group = self.group(qubit)
        if group.state is TOP:
            self._detach_fresh_zero(qubit)
            return
        post = reset_table(group.state, qubit, self.reset_mode)
        if post is TOP:
            group.state = TOP
            self._detach_fresh_zero(qubit)
            return
        del self.groups[self.group_of[qubit]]
        self._install_split(post)


def reset_table(table: AmplitudeTable, qubit: int, mode: ResetMode = "strict") -> AbstractState:
    """Abstract reset of one member of a known group.

    Terms with the qubit at 1 are dropped and the rest renormalized. In strict
    mode this is done only when the dropped branch, with the qubit flipped to
    0, is proportional to the kept branch (the channel output is then pure);
    otherwise the result is TOP.
    """
    pos = table.qubits.index(qubit)
    keep: dict[str, complex] = {}
    moved: dict[str, complex] = {}
    for bits, a in table.amps.items():
        if bits[pos] == "0":
            keep[bits] = a
        else:
            moved[bits[:pos] + "0" + bits[pos + 1 :]] = a
    if not moved:
        return table
    if not keep:
        return _canonical(table.qubits, moved)
    if mode == "strict" and not _proportional(keep, moved):
        return TOP
    return _canonical(table.qubits, keep)


def _proportional(a: dict[str, complex], b: dict[str, complex]) -> bool:
    if set(a) != set(b):
        return False
    inner = sum(a[k].conjugate() * b[k] for k in a)
    na = math.fsum(abs(v) ** 2 for v in a.values())
    nb = math.fsum(abs(v) ** 2 for v in b.values())
    return abs(inner) ** 2 >= na * nb * (1.0 - PROPORTIONAL_TOL)


@dataclass(frozen=True)
class SiteRecord:
    """Analysis fact at a measurement or reset, taken before the instruction."""

    index: int
    kind: Literal["measure", "reset"]
    qubit: int
    group: tuple[int, ...]
    state: AbstractState

    @property
    def position(self) -> int:
        return self.group.index(self.qubit)

    @property
    def known(self) -> bool:
        return self.state is not TOP


@dataclass
class AnalysisResult:
    sites: dict[int, SiteRecord] = field(default_factory=dict)
    final: UnionTable | None = None
    clbits: list[int | None] = field(default_factory=list)

    def final_statevector(self) -> np.ndarray | None:
        return None if self.final is None else self.final.statevector()

    def to_dict(self) -> dict:
        """JSON-ready dump: site states, final groups and known clbits."""
        sites = [
            {"index": r.index, "kind": r.kind, "qubit": r.qubit, "position": r.position,
             **state_to_dict(r.group, r.state)}
            for r in sorted(self.sites.values(), key=lambda r: r.index)
        ]
        groups = [] if self.final is None else [
            state_to_dict(q, st) for q, st in self.final.snapshot()
        ]
        return {"sites": sites, "final_groups": groups, "clbits": list(self.clbits)}


def state_to_dict(qubits, state: AbstractState) -> dict:
    if state is TOP:
        return {"group": list(qubits), "top": True, "state_size": None, "amplitudes": None}
    return {
        "group": list(qubits),
        "top": False,
        "state_size": state_size(state),
        "amplitudes": {k: [v.real, v.imag] for k, v in state.amps.items()},
    }


def _same_ops(branches) -> bool:
    first = branches[0].ops
    return all(br.ops == first for br in branches[1:])


def run(circuit: Circuit, n_max: int, reset_mode: ResetMode = "strict") -> AnalysisResult:
    """Analyze ``circuit`` and record the input state at every measure/reset."""
    table = UnionTable(circuit.n_qubits, n_max, reset_mode)
    clbits: list[int | None] = [0] * circuit.n_clbits
    result = AnalysisResult()
    for idx, ins in enumerate(circuit.instructions):
        if isinstance(ins, Gate):
            table.apply_gate(ins)
        elif isinstance(ins, (Measure, Reset)):
            g = table.group(ins.qubit)
            result.sites[idx] = SiteRecord(
                idx,
                "measure" if isinstance(ins, Measure) else "reset",
                ins.qubit,
                g.qubits,
                g.state,
            )
            if isinstance(ins, Measure):
                clbits[ins.clbit] = table.apply_measure(ins.qubit)
            else:
                table.apply_reset(ins.qubit)
        elif isinstance(ins, CondGate):
            known = clbits[ins.clbit]
            if known is None:
                table.make_top(ins.gate.qubits)
            elif known == ins.value:
                table.apply_gate(ins.gate)
        elif isinstance(ins, ProbGate):
            if _same_ops(ins.branches):
                for op in ins.branches[0].ops:
                    table.apply_gate(op)
            else:
                table.make_top(ins.qubits)
            for c in ins.clbits:
                values = {dict(br.writes)[c] for br in ins.branches if br.prob > 0}
                clbits[c] = values.pop() if len(values) == 1 else None
        else:  # pragma: no cover
            raise TypeError(f"unknown instruction {ins!r}")
    result.final = table
    result.clbits = clbits
    return result
