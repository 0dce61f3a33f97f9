"""Benchmark harness: sweep circuit scale and ``n_pcm`` over generated suites."""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

from dyncirc import pcm, randgen
from dyncirc.circuit import Circuit, count_dynamic_ops


@dataclass
class BenchRow:
    scale: int
    n_pcm: int
    circuit: str  # circuit index, or "all" for the aggregate
    original_dynamic: int
    removed_meas: int
    removed_resets: int
    removal_pct: float
    introduced_gates: int
    synth_time_s: float
    baseline_removed: int
    baseline_pct: float
    removal_pct_sd: float | None = None

    @property
    def removed(self) -> int:
        return self.removed_meas + self.removed_resets


CSV_FIELDS = [f.name for f in fields(BenchRow)]


def _pct(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


def _circuit_rows(
    scale: int, idx: int, circuit: Circuit, n_pcm_list: list[int], cfg: pcm.PassConfig
) -> list[BenchRow]:
    counts = count_dynamic_ops(circuit)
    dynamic = counts.measurements + counts.resets
    _, base = pcm.run_baselines(circuit)
    rows = []
    for n_pcm in n_pcm_list:
        run_cfg = pcm.PassConfig(
            n_pcm=n_pcm,
            n_max=cfg.n_max,
            mode=cfg.mode,
            reset_soundness=cfg.reset_soundness,
            seed=cfg.seed,
            synth_cap=cfg.synth_cap,
        )
        _, rep = pcm.run_pass(circuit, run_cfg)
        rows.append(
            BenchRow(
                scale=scale,
                n_pcm=n_pcm,
                circuit=str(idx),
                original_dynamic=dynamic,
                removed_meas=rep.removed_measurements,
                removed_resets=rep.removed_resets,
                removal_pct=_pct(rep.removed, dynamic),
                introduced_gates=rep.introduced_static_gates,
                synth_time_s=rep.synthesis_time,
                baseline_removed=base,
                baseline_pct=_pct(base, dynamic),
            )
        )
    return rows


def _task(args) -> list[BenchRow]:
    scale, idx, circuit, n_pcm_list, cfg = args
    return _circuit_rows(scale, idx, circuit, n_pcm_list, cfg)


def aggregate(rows: list[BenchRow]) -> BenchRow:
    """Sum a group of per-circuit rows; the SD is over per-circuit removal %."""
    dynamic = sum(r.original_dynamic for r in rows)
    removed = sum(r.removed for r in rows)
    base = sum(r.baseline_removed for r in rows)
    pcts = [r.removal_pct for r in rows]
    return BenchRow(
        scale=rows[0].scale,
        n_pcm=rows[0].n_pcm,
        circuit="all",
        original_dynamic=dynamic,
        removed_meas=sum(r.removed_meas for r in rows),
        removed_resets=sum(r.removed_resets for r in rows),
        removal_pct=_pct(removed, dynamic),
        introduced_gates=sum(r.introduced_gates for r in rows),
        synth_time_s=sum(r.synth_time_s for r in rows),
        baseline_removed=base,
        baseline_pct=_pct(base, dynamic),
        removal_pct_sd=statistics.stdev(pcts) if len(pcts) > 1 else 0.0,
    )


def run_bench(
    scales: list[int],
    n_pcm_list: list[int],
    count: int,
    seed: int = 0,
    cfg: pcm.PassConfig | None = None,
    jobs: int = 1,
    gen_kwargs: dict | None = None,
) -> tuple[list[BenchRow], list[BenchRow]]:
    """Return ``(per_circuit_rows, aggregate_rows)`` sorted by scale, n_pcm, circuit."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if not scales or not n_pcm_list:
        raise ValueError("need at least one scale and one n_pcm value")
    cfg = cfg or pcm.PassConfig()
    n_pcm_list = sorted(set(n_pcm_list))
    tasks = []
    for scale in scales:
        suite = randgen.generate_suite(scale, count, seed + scale, **(gen_kwargs or {}))
        tasks.extend((scale, i, c, n_pcm_list, cfg) for i, c in enumerate(suite))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_task, tasks))
    else:
        chunks = [_task(t) for t in tasks]
    rows = sorted(
        (r for chunk in chunks for r in chunk), key=lambda r: (r.scale, r.n_pcm, int(r.circuit))
    )
    aggs = []
    for scale in scales:
        for n_pcm in n_pcm_list:
            group = [r for r in rows if r.scale == scale and r.n_pcm == n_pcm]
            aggs.append(aggregate(group))
    check_monotone(rows)
    return rows, aggs


class MonotonicityError(AssertionError):
    pass


def check_monotone(rows: list[BenchRow]) -> None:
    """Removals and introduced gates must not drop as ``n_pcm`` grows, per circuit."""
    by_circuit: dict[tuple[int, str], list[BenchRow]] = {}
    for r in rows:
        by_circuit.setdefault((r.scale, r.circuit), []).append(r)
    for key, seq in by_circuit.items():
        seq = sorted(seq, key=lambda r: r.n_pcm)
        for a, b in zip(seq, seq[1:]):
            if b.removed < a.removed or b.introduced_gates < a.introduced_gates:
                raise MonotonicityError(
                    f"scale {key[0]} circuit {key[1]}: n_pcm {a.n_pcm}->{b.n_pcm} "
                    f"removed {a.removed}->{b.removed}, "
                    f"gates {a.introduced_gates}->{b.introduced_gates}"
                )


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(asdict(r))
    return buf.getvalue()


def rows_to_json(rows: list[BenchRow], aggs: list[BenchRow]) -> dict:
    return {"rows": [asdict(r) for r in rows], "aggregate": [asdict(r) for r in aggs]}
