"""
Random automata on a pinned PRNG.

``tv_generate`` draws Tabakov-Vardi NBWs over Σ = {0, 1}; ``random_abw``
draws alternating automata for the emptiness tests and benchmarks. Both are
bit-exact per seed: all randomness goes through splitmix64 and a
multiply-shift bounded draw.
"""
from decimal import ROUND_FLOOR, Decimal
from typing import List

from pydantic import BaseModel, Field, root_validator

from .core import FALSE, TRUE, Abw, Atom, Nbw, PosFormula, conj, disj
from .errors import PreconditionError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class Prng:
    """splitmix64."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        x = self.state
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
        return x ^ (x >> 31)

    def bounded(self, m: int) -> int:
        """Uniform-ish draw in [0, m): high word of the 128-bit product."""
        if m < 1:
            raise PreconditionError(f"bound must be positive, got {m}")
        return (self.next() * m) >> 64


def prng_next(prng: Prng) -> int:
    return prng.next()


def prng_bounded(prng: Prng, m: int) -> int:
    return prng.bounded(m)


def round_half_up(x: Decimal) -> int:
    """floor(x + 1/2)."""
    return int((x + Decimal("0.5")).to_integral_value(rounding=ROUND_FLOOR))


class TvParams(BaseModel):
    n: int = Field(ge=1)
    r: Decimal = Field(ge=0)
    f: Decimal = Field(ge=0, le=1)
    seed: int = Field(default=0, ge=0, le=(1 << 64) - 1)

    @root_validator(skip_on_failure=True)
    def _counts_fit(cls, values):
        n, r = values["n"], values["r"]
        if round_half_up(r * n) > n * n:
            raise ValueError(f"density r={r} needs more than n²={n * n} transitions")
        return values

    @property
    def transitions_per_letter(self) -> int:
        return round_half_up(self.r * self.n)

    @property
    def accepting_count(self) -> int:
        return round_half_up(self.f * self.n)

    def describe(self) -> str:
        return f"tabakov-vardi n={self.n} r={self.r} f={self.f} seed={self.seed}"


def _distinct(prng: Prng, bound: int, count: int) -> List[int]:
    seen: dict = {}
    while len(seen) < count:
        seen.setdefault(prng.bounded(bound), None)
    return list(seen)


def tv_generate(params: TvParams) -> Nbw:
    n = params.n
    prng = Prng(params.seed)
    transitions = []
    for letter in (0, 1):
        for value in _distinct(prng, n * n, params.transitions_per_letter):
            transitions.append((value // n, letter, value % n))
    accepting = _distinct(prng, n, params.accepting_count)
    return Nbw.build(n, ("0", "1"), 0, accepting, transitions)


def _random_formula(
    prng: Prng, n: int, d: int, c: int, true_pct: int, false_pct: int
) -> PosFormula:
    roll = prng.bounded(100)
    if roll < true_pct:
        return TRUE
    if roll < true_pct + false_pct:
        return FALSE
    clauses = []
    for _ in range(1 + prng.bounded(d)):
        atoms = dict.fromkeys(prng.bounded(n) for _ in range(1 + prng.bounded(c)))
        clauses.append(conj(Atom(s) for s in sorted(atoms)))
    return disj(clauses)


def random_abw(
    n: int,
    seed: int,
    *,
    d: int = 2,
    c: int = 2,
    f: Decimal = Decimal("0.5"),
    true_pct: int = 5,
    false_pct: int = 5,
    alphabet=("0", "1"),
) -> Abw:
    """Each δ(ℓ, σ) is true, false, or ≤ d disjuncts of ≤ c-state conjunctions."""
    if n < 1:
        raise PreconditionError("random_abw needs n ≥ 1")
    if not 0 <= Decimal(f) <= 1:
        raise PreconditionError(f"accepting density {f} outside [0, 1]")
    prng = Prng(seed)
    delta = tuple(
        tuple(_random_formula(prng, n, d, c, true_pct, false_pct) for _ in range(n))
        for _ in alphabet
    )
    accepting = _distinct(prng, n, round_half_up(Decimal(f) * n))
    return Abw(
        state_count=n,
        alphabet=tuple(alphabet),
        initial=0,
        accepting=frozenset(accepting),
        delta=delta,
    )
