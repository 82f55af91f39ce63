import csv
import math
from decimal import Decimal

import pytest

from app.bench import (
    CSV_HEADER,
    LABELS,
    TIMEOUT,
    BenchRow,
    lower_median,
    max_size,
    run_instance,
    summarize,
    sweep,
)

R, F = Decimal("1.5"), Decimal("0.5")


def test_lower_median():
    assert lower_median([3.0, 1.0, 2.0, 4.0]) == 2.0
    assert lower_median([5.0]) == 5.0
    assert lower_median([1.0, math.inf, math.inf]) == math.inf


@pytest.mark.parametrize("problem", sorted(LABELS))
def test_run_instance_labels(problem):
    row = run_instance(problem, 6, R, F, seed=1)
    assert row.result in LABELS[problem]
    assert row.time_ms >= 0
    assert row.point == (6, R, F)


def test_zero_timeout_marks_every_row():
    rows = sweep("universal", [5, 6], [R], [F], samples=3, timeout=0)
    assert len(rows) == 6
    assert {row.result for row in rows} == {TIMEOUT}


def test_answers_are_reproducible():
    first = [row.result for row in sweep("universal", [8], [R, Decimal("2.5")], [F], 4)]
    again = [row.result for row in sweep("universal", [8], [R, Decimal("2.5")], [F], 4)]
    assert first == again


def test_csv_is_appended_with_one_header(tmp_path):
    out = tmp_path / "runs.csv"
    sweep("empty", [4], [R], [F], samples=2, out=out)
    sweep("empty", [4], [R], [F], samples=2, out=out)
    with out.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 5
    assert [r[3] for r in rows[1:]] == ["0", "1", "0", "1"]
    assert all(r[4] in LABELS["empty"] for r in rows[1:])


def test_parallel_sweep_matches_serial():
    serial = sweep("universal", [6], [R], [F], samples=4)
    parallel = sweep("universal", [6], [R], [F], samples=4, jobs=2)
    assert [r.result for r in serial] == [r.result for r in parallel]
    assert [r.seed for r in parallel] == [0, 1, 2, 3]


def test_summarize():
    rows = [
        BenchRow(10, R, F, 0, "universal", 4.0),
        BenchRow(10, R, F, 1, "nonuniversal", 2.0),
        BenchRow(10, R, F, 2, TIMEOUT, 9.0),
        BenchRow(20, R, F, 0, "universal", 7.0),
    ]
    first, second = summarize(rows)
    assert (first.n, first.samples, first.timeouts) == (10, 3, 1)
    assert first.median_ms == 4.0
    assert first.fraction == pytest.approx(1 / 3)
    assert first.mean_ms == {"nonuniversal": 2.0, "universal": 4.0}
    assert second.median_ms == 7.0 and second.fraction == 1.0


def test_max_size_climbs_the_ladder():
    assert max_size(R, F, samples=3, quota=2, timeout=30.0, ladder=(4, 6)) == 6
    assert max_size(R, F, samples=2, quota=1, timeout=0.0, ladder=(4, 6)) is None
