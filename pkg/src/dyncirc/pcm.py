"""Measurement and reset elimination driven by constant propagation.

:func:`run_pass` analyzes the input once, then visits every measurement and
afterwards every reset. A site fires when its recorded input state is known
and has at most ``n_pcm`` nonzero amplitudes:

* a measurement of a group in state ``psi`` becomes ``T(psi -> |0..0>)``
  followed by a probabilistic gate choosing ``X_s`` with probability
  ``|alpha_s|**2`` and presetting the measurement's clbit to the measured
  qubit's bit of ``s``;
* a reset becomes the static circuit ``T(psi -> phi)`` where ``phi`` is the
  post-reset state.

Replacing a measurement leaves the group's other qubits in basis states,
which destroys coherence the original kept. ``mode="conservative"`` (default)
therefore fires on a multi-qubit group only when every other member is next
measured or reset, or never used again. ``mode="faithful"`` fires whenever the
size guard allows and may change the outcome distribution.

All replacements are computed against the single upfront analysis. The two
baseline passes are local pattern rewrites that need no analysis.
"""

from __future__ import annotations

import bisect
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Literal

from dyncirc import qcp
from dyncirc.circuit import (
    Branch,
    Circuit,
    CondGate,
    Gate,
    Instruction,
    Measure,
    ProbGate,
    Reset,
    count_dynamic_ops,
    parallel_x,
)
from dyncirc.qcp import TOP, AmplitudeTable, state_size
from dyncirc.synth import DEFAULT_CAP, transform

Mode = Literal["faithful", "conservative"]


class SkipSite(Exception):
    """A measurement or reset cannot be replaced; ``reason`` says why."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class PassConfig:
    n_pcm: int = 1
    n_max: int = 5
    mode: Mode = "conservative"
    reset_soundness: qcp.ResetMode = "strict"
    seed: int = 0
    synth_cap: int = DEFAULT_CAP

    def __post_init__(self) -> None:
        if self.n_pcm < 1 or self.n_max < 1:
            raise ValueError("n_pcm and n_max must be at least 1")
        if self.mode not in ("faithful", "conservative"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.reset_soundness not in ("strict", "paper"):
            raise ValueError(f"unknown reset soundness {self.reset_soundness!r}")


@dataclass
class SiteDecision:
    index: int
    kind: str
    qubit: int
    fired: bool
    reason: str
    state_size: int | None
    group_size: int
    introduced_gates: int = 0


@dataclass
class PassReport:
    removed_measurements: int = 0
    removed_resets: int = 0
    introduced_static_gates: int = 0
    synthesis_time: float = 0.0
    decisions: list[SiteDecision] = field(default_factory=list)

    @property
    def removed(self) -> int:
        return self.removed_measurements + self.removed_resets

    def to_dict(self) -> dict:
        return asdict(self)


def _embed(local: Circuit, qubits: tuple[int, ...]) -> list[Gate]:
    return [Gate(g.name, tuple(qubits[q] for q in g.qubits), g.params) for g in local]


def replace_measurement(
    site: Measure,
    state: AmplitudeTable,
    position: int | None = None,
    cap: int = DEFAULT_CAP,
) -> list[Instruction]:
    """Static-plus-probabilistic replacement of a measurement on a known state.

    A basis state needs no gates at all: the transformation to ``|0..0>`` and
    the parallel X that follows cancel, leaving only the clbit preset.
    """
    if state is TOP:
        raise SkipSite("top")
    group = state.qubits
    pos = group.index(site.qubit) if position is None else position
    if group[pos] != site.qubit:
        raise ValueError("position does not match the measured qubit")
    if state_size(state) == 1:
        (bits,) = state.amps
        write = ((site.clbit, int(bits[pos])),)
        return [ProbGate((site.qubit,), (Branch((), 1.0, write),))]
    n = len(group)
    to_zero = transform(state.to_vector(), AmplitudeTable.basis(range(n)).to_vector(), cap)
    weights = {bits: abs(a) ** 2 for bits, a in state.amps.items()}
    total = math.fsum(weights.values())
    branches = tuple(
        Branch(tuple(parallel_x(bits, group)), w / total, ((site.clbit, int(bits[pos])),))
        for bits, w in sorted(weights.items())
    )
    return [*_embed(to_zero, group), ProbGate(group, branches)]


def replace_reset(
    site: Reset,
    state: AmplitudeTable,
    position: int | None = None,
    reset_soundness: qcp.ResetMode = "strict",
    cap: int = DEFAULT_CAP,
) -> list[Instruction]:
    """Static circuit taking the group from ``state`` to its post-reset state."""
    if state is TOP:
        raise SkipSite("top")
    group = state.qubits
    if position is not None and group[position] != site.qubit:
        raise ValueError("position does not match the reset qubit")
    post = qcp.reset_table(state, site.qubit, reset_soundness)
    if post is TOP:
        raise SkipSite("mixed-reset")
    if post is state:
        return []
    return _embed(transform(state.to_vector(), post.to_vector(), cap), group)


class _WireIndex:
    """Instruction positions per qubit, for next-use queries."""

    def __init__(self, circuit: Circuit):
        self.instructions = circuit.instructions
        self.uses: dict[int, list[int]] = {q: [] for q in range(circuit.n_qubits)}
        for idx, ins in enumerate(circuit.instructions):
            for q in ins.qubits:
                self.uses[q].append(idx)

    def next_use(self, qubit: int, after: int) -> int | None:
        lst = self.uses[qubit]
        i = bisect.bisect_right(lst, after)
        return lst[i] if i < len(lst) else None

    def reset_between(self, qubit: int, lo: int, hi: int) -> bool:
        lst = self.uses[qubit]
        i = bisect.bisect_right(lst, lo)
        while i < len(lst) and lst[i] < hi:
            if isinstance(self.instructions[lst[i]], Reset):
                return True
            i += 1
        return False


def _coherence_unused(wires: _WireIndex, idx: int, measured: int, group) -> bool:
    for q in group:
        if q == measured:
            continue
        nxt = wires.next_use(q, idx)
        if nxt is not None and not isinstance(wires.instructions[nxt], (Measure, Reset)):
            return False
    return True


def run_pass(circuit: Circuit, cfg: PassConfig = PassConfig()) -> tuple[Circuit, PassReport]:
    analysis = qcp.run(circuit, cfg.n_max, cfg.reset_soundness)
    wires = _WireIndex(circuit)
    report = PassReport()
    replacements: dict[int, list[Instruction]] = {}
    collapsed: list[tuple[int, frozenset[int]]] = []

    def stale(rec: qcp.SiteRecord) -> bool:
        for fired_at, others in collapsed:
            if fired_at >= rec.index:
                continue
            for q in others.intersection(rec.group):
                if not wires.reset_between(q, fired_at, rec.index):
                    return True
        return False

    ordered = sorted(analysis.sites.values(), key=lambda r: (r.kind != "measure", r.index))
    for rec in ordered:
        size = None if rec.state is TOP else state_size(rec.state)
        decision = SiteDecision(rec.index, rec.kind, rec.qubit, False, "", size, len(rec.group))
        report.decisions.append(decision)
        if size is None:
            decision.reason = "top"
            continue
        if size > cfg.n_pcm:
            decision.reason = "size-exceeds-n_pcm"
            continue
        ins = circuit.instructions[rec.index]
        if (
            rec.kind == "measure"
            and cfg.mode == "conservative"
            and len(rec.group) > 1
            and not _coherence_unused(wires, rec.index, rec.qubit, rec.group)
        ):
            decision.reason = "coherence-consumed"
            continue
        if stale(rec):
            decision.reason = "stale-state"
            continue
        start = time.perf_counter()
        try:
            if rec.kind == "measure":
                new = replace_measurement(ins, rec.state, rec.position, cfg.synth_cap)
            else:
                new = replace_reset(
                    ins, rec.state, rec.position, cfg.reset_soundness, cfg.synth_cap
                )
        except SkipSite as skip:
            decision.reason = skip.reason
            continue
        finally:
            report.synthesis_time += time.perf_counter() - start
        replacements[rec.index] = new
        decision.fired = True
        decision.reason = "replaced"
        decision.introduced_gates = _introduced(new)
        report.introduced_static_gates += decision.introduced_gates
        if rec.kind == "measure":
            report.removed_measurements += 1
            if cfg.mode == "faithful" and len(rec.group) > 1:
                collapsed.append((rec.index, frozenset(rec.group) - {rec.qubit}))
        else:
            report.removed_resets += 1
    report.decisions.sort(key=lambda d: d.index)
    out: list[Instruction] = []
    for idx, ins in enumerate(circuit.instructions):
        out.extend(replacements.get(idx, (ins,)))
    return circuit.with_instructions(out), report


def _introduced(new: list[Instruction]) -> int:
    """Static gates per shot in the worst case: plain gates plus the longest branch."""
    n = 0
    for ins in new:
        if isinstance(ins, ProbGate):
            n += max(len(br.ops) for br in ins.branches)
        else:
            n += 1
    return n


def baseline_remove_reset_in_zero(circuit: Circuit) -> tuple[Circuit, int]:
    """Drop resets on wires that are syntactically still in |0>.

    A wire counts as |0> until any unitary instruction touches it. A reset
    puts it back, and measuring a |0> wire keeps it there.
    """
    zero = [True] * circuit.n_qubits
    out: list[Instruction] = []
    removed = 0
    for ins in circuit.instructions:
        if isinstance(ins, Reset):
            if zero[ins.qubit]:
                removed += 1
                continue
            zero[ins.qubit] = True
        elif not isinstance(ins, Measure):
            for q in ins.qubits:
                zero[q] = False
        out.append(ins)
    return circuit.with_instructions(out), removed


def baseline_reset_after_measure(circuit: Circuit) -> tuple[Circuit, int]:
    """Rewrite ``measure q -> c; reset q`` into ``measure q -> c; if (c==1) x q``.

    The reset must be the next instruction on the wire and the clbit must not
    be rewritten in between.
    """
    last_measure: dict[int, int] = {}
    last_write: dict[int, int] = {}
    out: list[Instruction] = []
    rewritten = 0
    for idx, ins in enumerate(circuit.instructions):
        new: Instruction = ins
        if isinstance(ins, Reset) and ins.qubit in last_measure:
            m = circuit.instructions[last_measure[ins.qubit]]
            if last_write.get(m.clbit) == last_measure[ins.qubit]:
                new = CondGate(m.clbit, 1, Gate("x", (ins.qubit,)))
                rewritten += 1
        for q in ins.qubits:
            last_measure.pop(q, None)
        if isinstance(ins, Measure):
            last_measure[ins.qubit] = idx
            last_write[ins.clbit] = idx
        elif isinstance(ins, ProbGate):
            for c in ins.clbits:
                last_write[c] = idx
        out.append(new)
    return circuit.with_instructions(out), rewritten


def run_baselines(circuit: Circuit) -> tuple[Circuit, int]:
    """Both baselines in sequence; returns the rewritten circuit and total removals."""
    step, a = baseline_remove_reset_in_zero(circuit)
    step, b = baseline_reset_after_measure(step)
    return step, a + b


def check_report(before: Circuit, after: Circuit, report: PassReport) -> None:
    b, a = count_dynamic_ops(before), count_dynamic_ops(after)
    assert report.removed_measurements == b.measurements - a.measurements
    assert report.removed_resets == b.resets - a.resets
