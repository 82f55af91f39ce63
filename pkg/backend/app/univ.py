"""
NBW universality through the implicit KVMH complement.

A KVMH state ⟨s, o⟩ is summarised by the pair of characteristic functions
⟨f_s, f_o⟩, where f_s(ℓ) is the least rank paired with ℓ in s. Ranks live in
[0, k] with k = 2(|Loc| − |α|); every value above k (including "absent") is
stored as TOP = k + 1, so a pair has exactly one encoding.

Smaller functions stand for larger sets, so the antichains here keep the
pointwise-minimal pairs: ⟨f, g⟩ ≤ ⟨f', g'⟩ means ⟨f', g'⟩'s state is
⪯_univ-below ⟨f, g⟩'s.
"""
import logging
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np

from .antichain import AntichainBase
from .config import get_settings
from .core import Letter, Nbw, StateId, ensure_valid
from .errors import InvariantViolation, PreconditionError
from .fixpoint import NEVER, Deadline, FixpointStats, buchi_fix

logger = logging.getLogger(__name__)

# upper bound on the number of scalar comparisons per vectorised chunk
_CHUNK = 1 << 22


class RankPair:
    """⟨f_s, f_o⟩; ``o_empty`` records whether f_o is the all-TOP function f_∅."""

    __slots__ = ("fs", "fo", "o_empty")

    def __init__(self, fs: np.ndarray, fo: np.ndarray, o_empty: bool):
        self.fs = fs
        self.fo = fo
        self.o_empty = o_empty

    @property
    def row(self) -> np.ndarray:
        return np.concatenate((self.fs, self.fo))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RankPair)
            and self.o_empty == other.o_empty
            and np.array_equal(self.fs, other.fs)
            and np.array_equal(self.fo, other.fo)
        )

    def __hash__(self) -> int:
        return hash((self.fs.tobytes(), self.fo.tobytes()))

    def __repr__(self) -> str:
        fo = "f∅" if self.o_empty else self.fo.tolist()
        return f"⟨{self.fs.tolist()}, {fo}⟩"


class RankSpace:
    """Rank bookkeeping for one NBW: k, TOP, α mask and padded successor tables."""

    def __init__(self, nbw: Nbw):
        self.nbw = nbw
        self.n = nbw.state_count
        self.k = 2 * (self.n - len(nbw.accepting))
        self.top = self.k + 1
        self.dtype = np.uint8 if self.top < 255 else np.uint16
        self.accepting = np.zeros(self.n, dtype=bool)
        self.accepting[sorted(nbw.accepting)] = True
        self.zero = np.zeros(self.n, dtype=self.dtype)
        self.f_empty = np.full(self.n, self.top, dtype=self.dtype)
        self.succ = tuple(self._padded(row) for row in nbw.delta)

    def _padded(self, row) -> np.ndarray:
        # column index n points at a sentinel 0, so max over no successor is 0
        width = max(1, max((len(t) for t in row), default=0))
        table = np.full((self.n, width), self.n, dtype=np.intp)
        for src, targets in enumerate(row):
            table[src, : len(targets)] = sorted(targets)
        return table

    def ceil_odd(self, v: np.ndarray) -> np.ndarray:
        return np.minimum(v + (v % 2 == 0), self.top).astype(self.dtype, copy=False)

    def ceil_even(self, v: np.ndarray) -> np.ndarray:
        return np.minimum(v + (v % 2), self.top).astype(self.dtype, copy=False)

    def fn(self, values: Iterable[int]) -> np.ndarray:
        f = np.minimum(np.asarray(list(values), dtype=np.int64), self.top)
        if f.shape != (self.n,) or (f < 0).any():
            raise PreconditionError(f"rank function needs {self.n} non-negative values")
        return f.astype(self.dtype)

    def pair(self, fs, fo) -> RankPair:
        fs = fs if isinstance(fs, np.ndarray) else self.fn(fs)
        fo = fo if isinstance(fo, np.ndarray) else self.fn(fo)
        return RankPair(fs, fo, bool((fo == self.top).all()))

    def pair_from_row(self, row: np.ndarray, o_empty: bool) -> RankPair:
        return RankPair(row[: self.n].copy(), row[self.n :].copy(), o_empty)

    def is_empty_fn(self, f: np.ndarray) -> bool:
        return bool((f == self.top).all())

    def check_rows(self, rows: np.ndarray, where: str) -> None:
        """Raise when some row breaks fs ≤ fo or has an odd rank ≤ k on α."""
        if not rows.shape[0]:
            return
        fs, fo = rows[:, : self.n], rows[:, self.n :]
        if (fs > fo).any():
            raise InvariantViolation(f"{where}: f_s ≤ f_o violated")
        on_alpha = rows[:, np.concatenate((self.accepting, self.accepting))]
        if ((on_alpha % 2 == 1) & (on_alpha <= self.k)).any():
            raise InvariantViolation(f"{where}: odd rank on an accepting state")
        if (rows > self.top).any():
            raise InvariantViolation(f"{where}: rank above TOP")


def leq_rank(p: RankPair, q: RankPair) -> bool:
    return (
        p.o_empty == q.o_empty
        and bool((p.fs <= q.fs).all())
        and bool((p.fo <= q.fo).all())
    )


def to_char(space: RankSpace, ranked: Iterable[Tuple[StateId, int]]) -> np.ndarray:
    """Characteristic function of a set of (state, rank) pairs."""
    f = space.f_empty.copy()
    for state, rank in ranked:
        if not 0 <= rank <= space.k:
            raise PreconditionError(
                f"rank {rank} of state {state} outside [0, {space.k}]"
            )
        if space.accepting[state] and rank % 2:
            raise PreconditionError(f"odd rank {rank} on accepting state {state}")
        f[state] = min(int(f[state]), rank)
    return f


def intersect_univ(space: RankSpace, p: RankPair, q: RankPair) -> Optional[RankPair]:
    """Pair representing ⟦p⟧ ∩ ⟦q⟧, or None when it is empty."""
    if p.o_empty != q.o_empty:
        return None
    fs = np.maximum(p.fs, q.fs)
    if p.o_empty:
        return RankPair(fs, space.f_empty.copy(), True)
    fo = np.maximum(p.fo, q.fo)
    if space.is_empty_fn(fo):
        return None
    return RankPair(fs, fo, False)


def min_union(
    space: RankSpace, l1: Iterable[RankPair], l2: Iterable[RankPair]
) -> list[RankPair]:
    ac = RankAntichain(space)
    ac.extend(l1)
    ac.extend(l2)
    return list(ac)


def pre_rows(
    space: RankSpace, letter: Letter, rows: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Predecessor step applied to every row fs‖fo of ``rows``.

    Returns the rows of the f_∅ stratum (⟨f_o, f_∅⟩ for every input) and of
    the other stratum (⟨f_s, f_o⟩ for inputs where some f_o(ℓ) ≤ k).
    """
    n, k = space.n, space.k
    succ = space.succ[letter]
    fs1, fo1 = rows[:, :n], rows[:, n:]
    pad = np.zeros((rows.shape[0], 1), dtype=space.dtype)

    # accepting successors keep f_o', others are capped by ⌈f_s'⌉_odd
    contrib = np.where(space.accepting, fo1, np.minimum(fo1, space.ceil_odd(fs1)))
    fo = np.hstack((contrib, pad))[:, succ].max(axis=2)
    fo = np.where(space.accepting, space.ceil_even(fo), fo).astype(space.dtype)

    empty_rows = np.hstack((fo, np.broadcast_to(space.f_empty, fo.shape)))

    live = (fo <= k).any(axis=1)
    fs = np.hstack((fs1[live], pad[live]))[:, succ].max(axis=2)
    fs = np.where(space.accepting, space.ceil_even(fs), fs).astype(space.dtype)
    live_rows = np.hstack((fs, fo[live]))
    return empty_rows, live_rows


def pre_univ(space: RankSpace, letter: Letter, pair: RankPair) -> list[RankPair]:
    """Pre^univ_σ(⟨f_s', f_o'⟩): at most two pairs."""
    row = pair.row[None, :]
    try:
        space.check_rows(row, "pre_univ input")
    except InvariantViolation as exc:
        raise PreconditionError(str(exc)) from exc
    empty_rows, live_rows = pre_rows(space, letter, row)
    if get_settings().check_invariants:
        space.check_rows(empty_rows, "pre_univ output")
        space.check_rows(live_rows, "pre_univ output")
    out = [space.pair_from_row(empty_rows[0], True)]
    if live_rows.shape[0]:
        out.append(space.pair_from_row(live_rows[0], False))
    return out


def _dominated(
    m: np.ndarray, rows: np.ndarray, exclude_self: bool = False
) -> np.ndarray:
    """For each row r of ``rows``: is some row of ``m`` pointwise ≤ r?

    With ``exclude_self``, ``rows`` is ``m`` itself (distinct rows) and r
    does not count against itself.
    """
    if not m.shape[0] or not rows.shape[0]:
        return np.zeros(rows.shape[0], dtype=bool)
    step = max(1, _CHUNK // max(1, m.shape[0] * m.shape[1]))
    out = np.empty(rows.shape[0], dtype=bool)
    for lo in range(0, rows.shape[0], step):
        chunk = rows[lo : lo + step]
        below = (m[None, :, :] <= chunk[:, None, :]).all(axis=2)
        out[lo : lo + step] = below.sum(axis=1) > (1 if exclude_self else 0)
    return out


class RankAntichain(AntichainBase[RankPair]):
    """Minimal rank pairs, kept per stratum as a 2-D array of rows fs‖fo."""

    def __init__(self, space: RankSpace, items: Iterable[RankPair] = ()):
        self.space = space
        width = 2 * space.n
        self._rows = {
            True: np.empty((0, width), dtype=space.dtype),
            False: np.empty((0, width), dtype=space.dtype),
        }
        self.extend(items)

    def __iter__(self) -> Iterator[RankPair]:
        for stratum in (False, True):
            for row in self._rows[stratum]:
                yield self.space.pair_from_row(row, stratum)

    def __len__(self) -> int:
        return self._rows[True].shape[0] + self._rows[False].shape[0]

    def __repr__(self) -> str:
        return f"RankAntichain({list(self)!r})"

    def rows(self, o_empty: bool) -> np.ndarray:
        return self._rows[o_empty]

    def all_rows(self) -> np.ndarray:
        return np.vstack((self._rows[False], self._rows[True]))

    def _insert_row(self, stratum: bool, v: np.ndarray) -> bool:
        m = self._rows[stratum]
        if m.shape[0]:
            if (m <= v).all(axis=1).any():
                return False
            m = m[~(v <= m).all(axis=1)]
        self._rows[stratum] = np.vstack((m, v))
        return True

    def insert(self, e: RankPair) -> bool:
        return self._insert_row(e.o_empty, e.row)

    def dominates(self, e: RankPair) -> bool:
        m = self._rows[e.o_empty]
        return bool(m.shape[0]) and bool((m <= e.row).all(axis=1).any())

    def add_rows(self, stratum: bool, rows: np.ndarray) -> np.ndarray:
        """Insert many rows at once; return those that enlarged the closure."""
        if not rows.shape[0]:
            return rows[:0]
        m = self._rows[stratum]
        rows = np.unique(rows, axis=0)
        rows = rows[~_dominated(m, rows)]
        if not rows.shape[0]:
            return rows
        # minimal rows of the block; rows are distinct after unique
        rows = rows[~_dominated(rows, rows, exclude_self=True)]
        if m.shape[0]:
            m = m[~_dominated(rows, m)]
        self._rows[stratum] = np.concatenate((m, rows))
        return rows

    def absorb(self, other) -> "RankAntichain":
        if not isinstance(other, RankAntichain):
            return super().absorb(other)
        fresh = self.empty_like()
        for stratum in (True, False):
            fresh._rows[stratum] = self.add_rows(stratum, other._rows[stratum])
        return fresh

    def below(self, other) -> bool:
        if not isinstance(other, RankAntichain):
            return super().below(other)
        return all(
            _dominated(other._rows[s], self._rows[s]).all() for s in (True, False)
        )

    def copy(self) -> "RankAntichain":
        out = self.empty_like()
        out._rows = {s: m.copy() for s, m in self._rows.items()}
        return out

    def empty_like(self) -> "RankAntichain":
        return RankAntichain(self.space)

    def only(self, o_empty: bool) -> "RankAntichain":
        """The sub-antichain of one stratum."""
        out = self.empty_like()
        out._rows[o_empty] = self._rows[o_empty].copy()
        return out


def pre_antichain(space: RankSpace, ac: RankAntichain) -> RankAntichain:
    """Max(Pre(↓ac)) over all letters."""
    out = RankAntichain(space)
    rows = ac.all_rows()
    if not rows.shape[0]:
        return out
    check = get_settings().check_invariants
    empties, lives = [], []
    for letter in space.nbw.letters:
        empty_rows, live_rows = pre_rows(space, letter, rows)
        if check:
            space.check_rows(empty_rows, "pre_univ output")
            space.check_rows(live_rows, "pre_univ output")
        empties.append(empty_rows)
        lives.append(live_rows)
    out.add_rows(True, np.concatenate(empties))
    out.add_rows(False, np.concatenate(lives))
    return out


def univ_top(space: RankSpace) -> RankAntichain:
    return RankAntichain(
        space,
        [
            RankPair(space.zero.copy(), space.zero.copy(), False),
            RankPair(space.zero.copy(), space.f_empty.copy(), True),
        ],
    )


class UnivDomain:
    """Antichain domain for F over KVMH(nbw)."""

    def __init__(self, nbw: Nbw):
        self.space = RankSpace(nbw)

    def top(self) -> RankAntichain:
        return univ_top(self.space)

    def pre(self, ac: RankAntichain) -> RankAntichain:
        return pre_antichain(self.space, ac)

    def meet_alpha(self, ac: RankAntichain) -> RankAntichain:
        # α' = Q × {∅} is the pair ⟨0, f_∅⟩; meeting it keeps the f_∅ stratum
        return ac.only(True)

    def contains_initial(self, ac: RankAntichain) -> bool:
        # q_ι = ({(ι, k)}, ∅)
        m = ac.rows(True)
        return bool((m[:, self.space.nbw.initial] <= self.space.k).any())


def is_universal(
    nbw: Nbw,
    early_stop: bool = True,
    deadline: Deadline = NEVER,
    stats: Optional[FixpointStats] = None,
) -> bool:
    """Whether L(nbw) = Σ^ω."""
    ensure_valid(nbw)
    domain = UnivDomain(nbw)
    logger.debug("universality: n=%d k=%d", domain.space.n, domain.space.k)
    return not buchi_fix(domain, early_stop, deadline, stats)
