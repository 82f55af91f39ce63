"""
Command-line front end.

Exit codes: 0 the property holds, 1 it does not, 2 usage/parse/oracle
disagreement, 3 timeout.
"""
import argparse
import logging
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from pydantic import ValidationError

from .alt_empty import abw_empty
from .bench import (
    DEFAULT_LADDER,
    LABELS,
    PROBLEMS,
    VERDICTS,
    max_size,
    summarize,
    sweep,
)
from .config import get_settings
from .core import Abw, Nbw
from .errors import AntichainError, AutomatonError, OracleCapExceeded, SolverTimeout
from .fileformat import parse, serialize
from .fixpoint import Deadline, FixpointStats
from .incl import is_included
from .oracle import abw_empty_oracle, include_oracle, universal_oracle
from .randgen import TvParams, tv_generate
from .univ import is_universal

logger = logging.getLogger(__name__)

EXIT_HOLDS, EXIT_FAILS, EXIT_ERROR, EXIT_TIMEOUT = 0, 1, 2, 3


class UsageError(AntichainError):
    pass


def _decimal(text: str) -> Decimal:
    try:
        return Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def parse_grid(text: str) -> List[Decimal]:
    """``a,b,c`` or ``start:stop:step`` (stop included)."""
    if ":" in text:
        parts = [_decimal(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError(
                f"bad range {text!r}, expected start:stop:step"
            )
        start, stop, step = parts
        out = []
        while start <= stop:
            out.append(start)
            start += step
        return out
    return [_decimal(p) for p in text.split(",") if p.strip()]


def parse_sizes(text: str) -> List[int]:
    values = parse_grid(text)
    if any(v != v.to_integral_value() or v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"sizes must be positive integers: {text!r}")
    return [int(v) for v in values]


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    """Flags accepted both before and after the subcommand."""

    def default(value):
        return argparse.SUPPRESS if suppress else value

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--oracle",
        action="store_true",
        default=default(False),
        help="also run the explicit oracle and fail on disagreement",
    )
    p.add_argument(
        "--no-early-stop",
        dest="early_stop",
        action="store_false",
        default=default(True),
        help="always iterate to the fixed point",
    )
    p.add_argument(
        "--timeout",
        type=float,
        default=default(None),
        help="per-decision timeout in seconds",
    )
    p.add_argument(
        "--stats",
        action="store_true",
        default=default(False),
        help="print fixed-point counters to stderr",
    )
    p.add_argument("-v", "--verbose", action="store_true", default=default(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antichainer",
        description="Antichain decision procedures for Büchi automata.",
        parents=[_global_flags(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    flags = [_global_flags(suppress=True)]

    p = sub.add_parser("universal", parents=flags, help="is L(A) = Σ^ω?")
    p.add_argument("file", type=Path)

    p = sub.add_parser("empty", parents=flags, help="is L(A) = ∅? (NBW or ABW)")
    p.add_argument("file", type=Path)

    p = sub.add_parser("include", parents=flags, help="is L(A) ⊆ L(B)?")
    p.add_argument("file_a", type=Path)
    p.add_argument("file_b", type=Path)

    p = sub.add_parser("generate", parents=flags, help="Tabakov-Vardi random NBW")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--r", type=_decimal, required=True)
    p.add_argument("--f", type=_decimal, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir", type=Path, default=None)

    p = sub.add_parser("bench", parents=flags, help="timing sweep")
    p.add_argument("--problem", choices=PROBLEMS, default="universal")
    p.add_argument("--sizes", type=parse_sizes, required=True)
    p.add_argument("--r", type=parse_grid, required=True)
    p.add_argument("--f", type=parse_grid, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("maxsize", parents=flags, help="largest size solved in time")
    p.add_argument("--problem", choices=PROBLEMS, default="universal")
    p.add_argument("--r", type=_decimal, required=True)
    p.add_argument("--f", type=_decimal, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--quota", type=int, default=50)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("serve", parents=flags, help="run the HTTP service")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _load_nbw(path: Path) -> Nbw:
    automaton = parse(path)
    if not isinstance(automaton, Nbw):
        raise UsageError(f"{path}: expected an NBW file")
    return automaton


def _decide(
    args: argparse.Namespace,
    problem: str,
    solve: Callable[..., bool],
    oracle: Callable[[], bool],
) -> int:
    stats = FixpointStats()
    timeout = args.timeout
    if timeout is None:
        timeout = get_settings().default_timeout
    holds = solve(
        early_stop=args.early_stop, deadline=Deadline.after(timeout), stats=stats
    )
    print(VERDICTS[problem][0 if holds else 1])
    if args.stats:
        print(
            f"outer_rounds={stats.outer_rounds} "
            f"inner_iterations={stats.inner_iterations} "
            f"max_antichain={stats.max_antichain}",
            file=sys.stderr,
        )
    if args.oracle:
        try:
            expected = oracle()
        except OracleCapExceeded as exc:
            logger.warning("oracle skipped: %s", exc)
        else:
            if expected != holds:
                verdict = VERDICTS[problem][0 if expected else 1]
                print(f"oracle disagrees: expected {verdict}", file=sys.stderr)
                return EXIT_ERROR
    return EXIT_HOLDS if holds else EXIT_FAILS


def cmd_universal(args) -> int:
    nbw = _load_nbw(args.file)
    return _decide(
        args,
        "universal",
        lambda **kw: is_universal(nbw, **kw),
        lambda: universal_oracle(nbw),
    )


def cmd_empty(args) -> int:
    automaton = parse(args.file)
    abw: Abw = automaton.as_abw() if isinstance(automaton, Nbw) else automaton
    return _decide(
        args,
        "empty",
        lambda **kw: abw_empty(abw, **kw),
        lambda: abw_empty_oracle(abw),
    )


def cmd_include(args) -> int:
    a1, a2 = _load_nbw(args.file_a), _load_nbw(args.file_b)
    return _decide(
        args,
        "include",
        lambda **kw: is_included(a1, a2, **kw),
        lambda: include_oracle(a1, a2),
    )


def cmd_generate(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seed, args.seed + args.count):
        params = TvParams(n=args.size, r=args.r, f=args.f, seed=seed)
        text = serialize(tv_generate(params), comments=[params.describe()])
        if args.out_dir is None:
            sys.stdout.write(text)
        else:
            name = f"tv-n{params.n}-r{params.r}-f{params.f}-s{seed}.ba"
            (args.out_dir / name).write_text(text, encoding="utf-8")
    return EXIT_HOLDS


def cmd_bench(args) -> int:
    if args.samples < 1 or args.jobs < 1:
        raise UsageError("--samples and --jobs must be at least 1")
    rows = sweep(
        args.problem,
        args.sizes,
        args.r,
        args.f,
        args.samples,
        timeout=args.timeout,
        out=args.out,
        jobs=args.jobs,
        early_stop=args.early_stop,
    )
    holds_label = LABELS[args.problem][0]
    for point in summarize(rows, args.problem):
        fields = [
            f"n={point.n}",
            f"r={point.r}",
            f"f={point.f}",
            f"median_ms={point.median_ms:.1f}",
            f"{holds_label}={point.fraction:.2f}",
            f"timeouts={point.timeouts}",
        ]
        fields += [f"mean_ms[{k}]={v:.1f}" for k, v in point.mean_ms.items()]
        print(" ".join(fields))
    return EXIT_HOLDS


def cmd_maxsize(args) -> int:
    best = max_size(
        args.r,
        args.f,
        samples=args.samples,
        quota=args.quota,
        timeout=args.timeout if args.timeout is not None else 20.0,
        ladder=DEFAULT_LADDER,
        problem=args.problem,
        jobs=args.jobs,
    )
    print(f"r={args.r} f={args.f} max_size={best if best is not None else '-'}")
    return EXIT_HOLDS


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return EXIT_HOLDS


COMMANDS = {
    "universal": cmd_universal,
    "empty": cmd_empty,
    "include": cmd_include,
    "generate": cmd_generate,
    "bench": cmd_bench,
    "maxsize": cmd_maxsize,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except SolverTimeout as exc:
        print(f"TIMEOUT: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except AutomatonError as exc:
        for diag in exc.diagnostics:
            print(f"error: {diag}", file=sys.stderr)
        return EXIT_ERROR
    except (AntichainError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
