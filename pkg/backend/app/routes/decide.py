import logging
import time
from typing import Callable

from fastapi import APIRouter, HTTPException, status

from ..alt_empty import abw_empty
from ..bench import VERDICTS
from ..config import get_settings
from ..core import Automaton, Nbw
from ..errors import (
    AutomatonError,
    OracleCapExceeded,
    PreconditionError,
    SolverTimeout,
)
from ..fileformat import parse_text
from ..fixpoint import Deadline, FixpointStats
from ..incl import is_included
from ..oracle import abw_empty_oracle, include_oracle, universal_oracle
from ..schemas import (
    Decision,
    DecisionOptions,
    DecisionRequest,
    FixpointStatsOut,
    IncludeRequest,
)
from ..univ import is_universal

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/decide", tags=["decide"])


def _unprocessable(field: str, exc: AutomatonError) -> HTTPException:
    return HTTPException(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        detail=[
            {
                "field": field,
                "message": d.message,
                "line": d.line,
                "state": d.state,
                "letter": d.letter,
            }
            for d in exc.diagnostics
        ],
    )


def _load(text: str, field: str) -> Automaton:
    try:
        return parse_text(text)
    except AutomatonError as exc:
        raise _unprocessable(field, exc)


def _load_nbw(text: str, field: str) -> Nbw:
    automaton = _load(text, field)
    if not isinstance(automaton, Nbw):
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=[{"field": field, "message": "expected an NBW"}],
        )
    return automaton


def _decide(
    problem: str,
    opts: DecisionOptions,
    solve: Callable[..., bool],
    oracle: Callable[[], bool],
) -> Decision:
    timeout = opts.timeout
    if timeout is None:
        timeout = get_settings().default_timeout
    stats = FixpointStats()
    start = time.perf_counter()
    try:
        holds = solve(
            early_stop=opts.early_stop, deadline=Deadline.after(timeout), stats=stats
        )
    except SolverTimeout:
        raise HTTPException(
            status_code=status.HTTP_408_REQUEST_TIMEOUT,
            detail=f"{problem} decision exceeded {timeout} s",
        )
    except AutomatonError as exc:
        raise _unprocessable("automaton", exc)
    except PreconditionError as exc:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc)
        )
    elapsed = (time.perf_counter() - start) * 1000.0

    agrees = None
    if opts.oracle:
        try:
            agrees = oracle() == holds
        except OracleCapExceeded as exc:
            logger.warning("oracle skipped: %s", exc)
        if agrees is False:
            raise HTTPException(
                status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
                detail=f"oracle disagrees with {VERDICTS[problem][0 if holds else 1]}",
            )
    return Decision(
        problem=problem,
        holds=holds,
        verdict=VERDICTS[problem][0 if holds else 1],
        elapsed_ms=elapsed,
        oracle_agrees=agrees,
        stats=FixpointStatsOut.from_orm(stats),
    )


@router.post("/universal", response_model=Decision)
def decide_universal(payload: DecisionRequest):
    nbw = _load_nbw(payload.automaton, "automaton")
    return _decide(
        "universal",
        payload,
        lambda **kw: is_universal(nbw, **kw),
        lambda: universal_oracle(nbw),
    )


@router.post("/empty", response_model=Decision)
def decide_empty(payload: DecisionRequest):
    automaton = _load(payload.automaton, "automaton")
    abw = automaton.as_abw() if isinstance(automaton, Nbw) else automaton
    return _decide(
        "empty",
        payload,
        lambda **kw: abw_empty(abw, **kw),
        lambda: abw_empty_oracle(abw),
    )


@router.post("/include", response_model=Decision)
def decide_include(payload: IncludeRequest):
    a1 = _load_nbw(payload.automaton_a, "automaton_a")
    a2 = _load_nbw(payload.automaton_b, "automaton_b")
    return _decide(
        "include",
        payload,
        lambda **kw: is_included(a1, a2, **kw),
        lambda: include_oracle(a1, a2),
    )
