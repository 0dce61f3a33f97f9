from __future__ import annotations

import pytest

from dyncirc import bench
from dyncirc.bench import BenchRow, MonotonicityError, check_monotone, run_bench


def test_one_scale_one_n_pcm():
    rows, aggs = run_bench([1], [1], 10, seed=0)
    assert len(rows) == 10 and len(aggs) == 1
    agg = aggs[0]
    assert agg.circuit == "all"
    assert agg.removed_meas == sum(r.removed_meas for r in rows)
    assert agg.original_dynamic == sum(r.original_dynamic for r in rows)
    assert agg.removal_pct_sd is not None and agg.removal_pct_sd >= 0
    for r in rows + aggs:
        assert 0 <= r.removal_pct <= 100 and r.removed >= 0


def test_sweep_is_monotone():
    rows, aggs = run_bench([1], [1, 2, 4, 8], 6, seed=1)
    removed = [a.removed for a in aggs]
    assert removed == sorted(removed)


def test_check_monotone_raises():
    def row(n_pcm, removed):
        return BenchRow(1, n_pcm, "0", 10, removed, 0, 10.0 * removed, 0, 0.0, 0, 0.0)

    check_monotone([row(1, 1), row(2, 2)])
    with pytest.raises(MonotonicityError):
        check_monotone([row(1, 2), row(2, 1)])


def test_count_zero_rejected():
    with pytest.raises(ValueError):
        run_bench([1], [1], 0)


def test_csv_header_is_stable():
    rows, aggs = run_bench([1], [1], 2, seed=0)
    text = bench.rows_to_csv(aggs + rows)
    assert text.splitlines()[0] == ",".join(bench.CSV_FIELDS)
    assert bench.CSV_FIELDS == [
        "scale", "n_pcm", "circuit", "original_dynamic", "removed_meas", "removed_resets",
        "removal_pct", "introduced_gates", "synth_time_s", "baseline_removed",
        "baseline_pct", "removal_pct_sd",
    ]
