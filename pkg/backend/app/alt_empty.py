"""
ABW emptiness without building the Miyano-Hayashi NBW.

Elements are pairs ⟨s, o⟩ of state bitmasks ordered by ⪯_alt:
s ⊆ s', o ⊆ o' and (o = ∅ iff o' = ∅).
"""
from dataclasses import dataclass
from typing import Optional

from .antichain import Antichain
from .config import get_settings
from .core import Abw, Letter, ensure_valid, mask_of, states_of
from .errors import InvariantViolation, PreconditionError
from .fixpoint import NEVER, Deadline, FixpointStats, buchi_fix


@dataclass(frozen=True)
class MhPair:
    s: int
    o: int

    @classmethod
    def of(cls, s, o) -> "MhPair":
        return cls(mask_of(s), mask_of(o))

    @property
    def level(self) -> frozenset:
        return states_of(self.s)

    @property
    def owing(self) -> frozenset:
        return states_of(self.o)

    def __repr__(self) -> str:
        return f"⟨{sorted(self.level)},{sorted(self.owing)}⟩"


def leq_alt(p: MhPair, q: MhPair) -> bool:
    return (
        not p.s & ~q.s
        and not p.o & ~q.o
        and (p.o == 0) == (q.o == 0)
    )


def intersect_alt(p: MhPair, q: MhPair) -> Optional[MhPair]:
    """Pair whose closure is ↓p ∩ ↓q, or None when that intersection is empty."""
    o = p.o & q.o
    if o:
        return MhPair(p.s & q.s, o)
    if p.o == 0 and q.o == 0:
        return MhPair(p.s & q.s, 0)
    return None


def pre_alt(abw: Abw, letter: Letter, pair: MhPair) -> list[MhPair]:
    """Maximal elements of Pre_σ(↓{⟨s', o'⟩}) in MH(abw)."""
    s1, o1 = pair.s, pair.o
    if o1 & ~s1:
        raise PreconditionError(f"pre_alt needs o ⊆ s, got {pair!r}")
    alpha = abw.accepting_mask
    out = []
    # successors strip α from o, so nothing steps into a non-empty o ⊆ α
    if o1 and not o1 & ~alpha:
        return out
    o = abw.sat_mask(letter, o1 | (s1 & alpha))
    out.append(MhPair(o, 0))
    if o:
        out.append(MhPair(abw.sat_mask(letter, s1), o))
    if get_settings().check_invariants:
        for p in out:
            if p.o & ~p.s:
                raise InvariantViolation(f"pre_alt produced {p!r} with o ⊄ s")
    return out


class AltDomain:
    """Antichain domain for F over MH(abw)."""

    def __init__(self, abw: Abw):
        self.abw = abw
        self.full = (1 << abw.state_count) - 1
        self.initial_bit = 1 << abw.initial

    def empty(self) -> Antichain:
        return Antichain(leq_alt)

    def top(self) -> Antichain:
        return Antichain(leq_alt, [MhPair(self.full, self.full), MhPair(self.full, 0)])

    def pre(self, ac: Antichain) -> Antichain:
        out = self.empty()
        for letter in self.abw.letters:
            for pair in ac:
                out.extend(pre_alt(self.abw, letter, pair))
        return out

    def meet_alpha(self, ac: Antichain) -> Antichain:
        # meeting with the accepting top ⟨Loc, ∅⟩ keeps exactly the o = ∅ pairs
        return ac.filter(lambda p: p.o == 0)

    def contains_initial(self, ac: Antichain) -> bool:
        return any(p.o == 0 and p.s & self.initial_bit for p in ac)


def abw_empty(
    abw: Abw,
    early_stop: bool = True,
    deadline: Deadline = NEVER,
    stats: Optional[FixpointStats] = None,
) -> bool:
    """Whether L(abw) = ∅."""
    ensure_valid(abw)
    return not buchi_fix(AltDomain(abw), early_stop, deadline, stats)
