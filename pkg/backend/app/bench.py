"""
Benchmark harness: random instances, per-instance timeouts, CSV rows and
per-point summaries (median time, fraction of instances where the property
holds, timing split by answer).
"""
import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from itertools import chain
from pathlib import Path
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .alt_empty import abw_empty
from .errors import SolverTimeout
from .fixpoint import Deadline
from .incl import is_included
from .randgen import TvParams, random_abw, tv_generate
from .univ import is_universal

logger = logging.getLogger(__name__)

CSV_HEADER = ("n", "r", "f", "seed", "result", "time_ms")
TIMEOUT = "timeout"

# (label when the property holds, label when it does not)
LABELS: Dict[str, Tuple[str, str]] = {
    "universal": ("universal", "nonuniversal"),
    "include": ("included", "notincluded"),
    "empty": ("empty", "nonempty"),
}
PROBLEMS = tuple(LABELS)

# what the CLI prints and the service reports
VERDICTS: Dict[str, Tuple[str, str]] = {
    "universal": ("UNIVERSAL", "NOT_UNIVERSAL"),
    "include": ("INCLUDED", "NOT_INCLUDED"),
    "empty": ("EMPTY", "NONEMPTY"),
}

DEFAULT_LADDER: Tuple[int, ...] = tuple(
    chain(
        range(10, 101, 10),
        range(120, 201, 20),
        range(230, 501, 30),
        range(550, 1001, 50),
        range(1100, 1501, 100),
    )
)


@dataclass(frozen=True)
class BenchRow:
    n: int
    r: Decimal
    f: Decimal
    seed: int
    result: str
    time_ms: float

    @property
    def point(self) -> Tuple[int, Decimal, Decimal]:
        return (self.n, self.r, self.f)

    def as_csv(self) -> List[str]:
        return [
            str(self.n),
            str(self.r),
            str(self.f),
            str(self.seed),
            self.result,
            f"{self.time_ms:.3f}",
        ]


def _decider(
    problem: str, n: int, r: Decimal, f: Decimal, seed: int
) -> Callable[..., bool]:
    """Build the instance up front and return the (timed) decision call."""
    if problem == "universal":
        nbw = tv_generate(TvParams(n=n, r=r, f=f, seed=seed))
        return lambda **kw: is_universal(nbw, **kw)
    if problem == "include":
        a1 = tv_generate(TvParams(n=n, r=r, f=f, seed=2 * seed))
        a2 = tv_generate(TvParams(n=n, r=r, f=f, seed=2 * seed + 1))
        return lambda **kw: is_included(a1, a2, **kw)
    if problem == "empty":
        abw = random_abw(n, seed, f=f)
        return lambda **kw: abw_empty(abw, **kw)
    raise ValueError(f"unknown problem {problem!r}")


def run_instance(
    problem: str,
    n: int,
    r: Decimal,
    f: Decimal,
    seed: int,
    timeout: Optional[float] = None,
    early_stop: bool = True,
) -> BenchRow:
    decide = _decider(problem, n, r, f, seed)
    deadline = Deadline.after(timeout)
    start = time.perf_counter()
    try:
        holds = decide(early_stop=early_stop, deadline=deadline)
        result = LABELS[problem][0 if holds else 1]
    except SolverTimeout:
        result = TIMEOUT
    elapsed = (time.perf_counter() - start) * 1000.0
    return BenchRow(n, r, f, seed, result, elapsed)


def _run_task(task: tuple) -> BenchRow:
    return run_instance(*task)


@dataclass
class PointSummary:
    n: int
    r: Decimal
    f: Decimal
    samples: int
    median_ms: float
    fraction: float
    timeouts: int
    mean_ms: Dict[str, float] = field(default_factory=dict)


def lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def summarize(
    rows: Iterable[BenchRow], problem: str = "universal"
) -> List[PointSummary]:
    """One summary per (n, r, f), in first-seen order; timeouts count as +∞."""
    groups: Dict[Tuple, List[BenchRow]] = {}
    for row in rows:
        groups.setdefault(row.point, []).append(row)
    holds_label = LABELS[problem][0]
    out = []
    for (n, r, f), group in groups.items():
        times = [math.inf if g.result == TIMEOUT else g.time_ms for g in group]
        by_result: Dict[str, List[float]] = {}
        for g in group:
            if g.result != TIMEOUT:
                by_result.setdefault(g.result, []).append(g.time_ms)
        out.append(
            PointSummary(
                n=n,
                r=r,
                f=f,
                samples=len(group),
                median_ms=lower_median(times),
                fraction=sum(g.result == holds_label for g in group) / len(group),
                timeouts=sum(g.result == TIMEOUT for g in group),
                mean_ms={k: sum(v) / len(v) for k, v in sorted(by_result.items())},
            )
        )
    return out


def _execute(tasks: List[tuple], jobs: int) -> Iterator[BenchRow]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            yield from pool.map(_run_task, tasks)
    else:
        for task in tasks:
            yield _run_task(task)


def sweep(
    problem: str,
    sizes: Sequence[int],
    rs: Sequence[Decimal],
    fs: Sequence[Decimal],
    samples: int,
    timeout: Optional[float] = None,
    out: Optional[Path] = None,
    jobs: int = 1,
    early_stop: bool = True,
) -> List[BenchRow]:
    """Run every grid point with seeds 0..samples-1.

    Rows are appended to ``out`` (flushed one by one) as they arrive.
    """
    tasks = [
        (problem, n, r, f, seed, timeout, early_stop)
        for n in sizes
        for r in rs
        for f in fs
        for seed in range(samples)
    ]
    rows: List[BenchRow] = []
    handle = None
    if out is not None:
        fresh = not out.exists() or out.stat().st_size == 0
        handle = out.open("a", newline="", encoding="utf-8")
        writer = csv.writer(handle)
        if fresh:
            writer.writerow(CSV_HEADER)
            handle.flush()
    try:
        for row in _execute(tasks, jobs):
            rows.append(row)
            if handle is not None:
                writer.writerow(row.as_csv())
                handle.flush()
            if len(rows) % samples == 0:
                point = summarize(rows[-samples:], problem)[0]
                logger.info(
                    "n=%s r=%s f=%s: median %.1f ms, %s fraction %.2f, %d timeouts",
                    point.n,
                    point.r,
                    point.f,
                    point.median_ms,
                    LABELS[problem][0],
                    point.fraction,
                    point.timeouts,
                )
    finally:
        if handle is not None:
            handle.close()
    return rows


def max_size(
    r: Decimal,
    f: Decimal,
    samples: int = 100,
    quota: int = 50,
    timeout: float = 20.0,
    ladder: Sequence[int] = DEFAULT_LADDER,
    problem: str = "universal",
    jobs: int = 1,
) -> Optional[int]:
    """Largest ladder size where ≥ quota samples finish in time (None if none does)."""
    best = None
    for n in ladder:
        rows = sweep(problem, [n], [r], [f], samples, timeout, jobs=jobs)
        finished = sum(row.result != TIMEOUT for row in rows)
        logger.info("size %d: %d/%d finished", n, finished, samples)
        if finished < quota:
            break
        best = n
    return best
