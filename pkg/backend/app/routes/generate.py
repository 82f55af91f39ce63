from fastapi import APIRouter, HTTPException, status
from pydantic import ValidationError

from ..fileformat import serialize
from ..randgen import TvParams, tv_generate
from ..schemas import GenerateOut, GenerateRequest

router = APIRouter(prefix="/generate", tags=["generate"])


@router.post("", response_model=GenerateOut)
def generate(payload: GenerateRequest):
    try:
        params = TvParams(n=payload.n, r=payload.r, f=payload.f, seed=payload.seed)
    except ValidationError as exc:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=exc.errors(),
        )
    nbw = tv_generate(params)
    return GenerateOut(
        seed=params.seed,
        transitions={
            letter: sum(len(t) for t in nbw.delta[a])
            for a, letter in enumerate(nbw.alphabet)
        },
        accepting=len(nbw.accepting),
        automaton=serialize(nbw, comments=[params.describe()]),
    )
