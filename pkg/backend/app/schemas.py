from decimal import Decimal
from typing import Dict, Optional

from pydantic import BaseModel, Field


class DecisionOptions(BaseModel):
    early_stop: bool = True
    timeout: Optional[float] = Field(default=None, ge=0)
    oracle: bool = False


class DecisionRequest(DecisionOptions):
    automaton: str = Field(description="automaton in the text file format")


class IncludeRequest(DecisionOptions):
    automaton_a: str
    automaton_b: str


class FixpointStatsOut(BaseModel):
    outer_rounds: int
    inner_iterations: int
    max_antichain: int

    class Config:
        orm_mode = True


class Decision(BaseModel):
    problem: str
    holds: bool
    verdict: str
    elapsed_ms: float
    oracle_agrees: Optional[bool] = None
    stats: FixpointStatsOut


class GenerateRequest(BaseModel):
    n: int = Field(ge=1)
    r: Decimal = Field(ge=0)
    f: Decimal = Field(ge=0, le=1)
    seed: int = Field(default=0, ge=0)


class GenerateOut(BaseModel):
    seed: int
    transitions: Dict[str, int]
    accepting: int
    automaton: str
