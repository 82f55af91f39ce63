"""
Language inclusion L(A1) ⊆ L(A2) as emptiness of A1 × KVMH(A2).

The product carries the generalized Büchi condition {α₁ × Loc₂, Loc₁ × α₂}
(the second set is the f_∅ stratum of the rank pairs). Elements with
different A1 locations are incomparable, so antichains are bucketed by a1.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Tuple

import numpy as np

from .antichain import AntichainBase
from .config import get_settings
from .core import Letter, Nbw, StateId, ensure_valid
from .fixpoint import NEVER, Deadline, FixpointStats, gen_buchi_fix
from .univ import RankAntichain, RankPair, RankSpace, leq_rank, pre_rows, univ_top

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProductElem:
    a1: StateId
    rp: RankPair

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProductElem)
            and self.a1 == other.a1
            and self.rp == other.rp
        )

    def __hash__(self) -> int:
        return hash((self.a1, self.rp))


def leq_inc(p: ProductElem, q: ProductElem) -> bool:
    """p ⪯_inc q. Rank pairs compare reversed: smaller functions, larger sets."""
    return p.a1 == q.a1 and leq_rank(q.rp, p.rp)


def pre_inc(
    a1: Nbw, space2: RankSpace, letter: Letter, elem: ProductElem
) -> list[ProductElem]:
    sources = a1.pred_lists[letter][elem.a1]
    if not sources:
        return []
    empty_rows, live_rows = pre_rows(space2, letter, elem.rp.row[None, :])
    pairs = [space2.pair_from_row(empty_rows[0], True)]
    if live_rows.shape[0]:
        pairs.append(space2.pair_from_row(live_rows[0], False))
    return [ProductElem(src, rp) for src in sources for rp in pairs]


class ProductAntichain(AntichainBase[ProductElem]):
    """Map a1 → RankAntichain over A2's rank space."""

    def __init__(self, space2: RankSpace, items: Iterable[ProductElem] = ()):
        self.space = space2
        self.buckets: Dict[StateId, RankAntichain] = {}
        self.extend(items)

    def bucket(self, a1: StateId) -> RankAntichain:
        ac = self.buckets.get(a1)
        if ac is None:
            ac = self.buckets[a1] = RankAntichain(self.space)
        return ac

    def __iter__(self) -> Iterator[ProductElem]:
        for a1 in sorted(self.buckets):
            for rp in self.buckets[a1]:
                yield ProductElem(a1, rp)

    def __len__(self) -> int:
        return sum(len(ac) for ac in self.buckets.values())

    def __repr__(self) -> str:
        return f"ProductAntichain({list(self)!r})"

    def insert(self, e: ProductElem) -> bool:
        return self.bucket(e.a1).insert(e.rp)

    def dominates(self, e: ProductElem) -> bool:
        ac = self.buckets.get(e.a1)
        return ac is not None and ac.dominates(e.rp)

    def copy(self) -> "ProductAntichain":
        out = self.empty_like()
        out.buckets = {a1: ac.copy() for a1, ac in self.buckets.items() if ac}
        return out

    def empty_like(self) -> "ProductAntichain":
        return ProductAntichain(self.space)

    def absorb(self, other) -> "ProductAntichain":
        if not isinstance(other, ProductAntichain):
            return super().absorb(other)
        fresh = self.empty_like()
        for a1, ac in other.buckets.items():
            new = self.bucket(a1).absorb(ac)
            if new:
                fresh.buckets[a1] = new
        return fresh

    def below(self, other) -> bool:
        if not isinstance(other, ProductAntichain):
            return super().below(other)
        for a1, ac in self.buckets.items():
            if not ac:
                continue
            theirs = other.buckets.get(a1)
            if theirs is None or not ac.below(theirs):
                return False
        return True

    def map_buckets(self, fn) -> "ProductAntichain":
        out = self.empty_like()
        for a1, ac in self.buckets.items():
            kept = fn(a1, ac)
            if kept:
                out.buckets[a1] = kept
        return out


def _meet_rows(space: RankSpace, r1: np.ndarray, r2: np.ndarray, o_empty: bool):
    """Row-wise intersect_univ of every row of r1 with every row of r2."""
    n = space.n
    if not r1.shape[0] or not r2.shape[0]:
        return r1[:0]
    parts = []
    for row in r1:
        met = np.maximum(r2, row)
        if o_empty:
            met[:, n:] = space.top
        else:
            met = met[~(met[:, n:] == space.top).all(axis=1)]
        parts.append(met)
    return np.vstack(parts)


class InclDomain:
    """Generalized Büchi antichain domain over A1 × KVMH(A2)."""

    def __init__(self, a1: Nbw, a2: Nbw):
        self.a1 = a1
        self.a2 = a2
        self.space = RankSpace(a2)

    def top(self) -> ProductAntichain:
        out = ProductAntichain(self.space)
        for loc in range(self.a1.state_count):
            out.buckets[loc] = univ_top(self.space)
        return out

    def pre(self, ac: ProductAntichain) -> ProductAntichain:
        out = ProductAntichain(self.space)
        check = get_settings().check_invariants
        pending: Dict[StateId, Tuple[list, list]] = {}
        for letter in self.a1.letters:
            preds = self.a1.pred_lists[letter]
            for a1, bucket in ac.buckets.items():
                sources = preds[a1]
                if not sources or not bucket:
                    continue
                empty_rows, live_rows = pre_rows(self.space, letter, bucket.all_rows())
                if check:
                    self.space.check_rows(empty_rows, "pre_inc output")
                    self.space.check_rows(live_rows, "pre_inc output")
                for src in sources:
                    empties, lives = pending.setdefault(src, ([], []))
                    empties.append(empty_rows)
                    lives.append(live_rows)
        for src, (empties, lives) in pending.items():
            target = out.bucket(src)
            target.add_rows(True, np.concatenate(empties))
            target.add_rows(False, np.concatenate(lives))
        return out

    def meet_beta1(self, ac: ProductAntichain) -> ProductAntichain:
        accepting = self.a1.accepting
        return ac.map_buckets(lambda a1, b: b.copy() if a1 in accepting else None)

    def meet_beta2(self, ac: ProductAntichain) -> ProductAntichain:
        return ac.map_buckets(lambda a1, b: b.only(True))

    def meet(self, ac1: ProductAntichain, ac2: ProductAntichain) -> ProductAntichain:
        out = ProductAntichain(self.space)
        for a1, b1 in ac1.buckets.items():
            b2 = ac2.buckets.get(a1)
            if b2 is None:
                continue
            met = RankAntichain(self.space)
            for stratum in (True, False):
                met.add_rows(
                    stratum,
                    _meet_rows(self.space, b1.rows(stratum), b2.rows(stratum), stratum),
                )
            if met:
                out.buckets[a1] = met
        return out

    def contains_initial(self, ac: ProductAntichain) -> bool:
        bucket = ac.buckets.get(self.a1.initial)
        if bucket is None:
            return False
        m = bucket.rows(True)
        return bool((m[:, self.a2.initial] <= self.space.k).any())


def is_included(
    a1: Nbw,
    a2: Nbw,
    early_stop: bool = True,
    deadline: Deadline = NEVER,
    stats: Optional[FixpointStats] = None,
) -> bool:
    """Whether L(a1) ⊆ L(a2). Letters are matched by name."""
    ensure_valid(a1)
    ensure_valid(a2)
    a2 = a2.with_alphabet(a1.alphabet)
    domain = InclDomain(a1, a2)
    logger.debug(
        "inclusion: %d x %d locations, k2=%d",
        a1.state_count,
        a2.state_count,
        domain.space.k,
    )
    return not gen_buchi_fix(domain, early_stop, deadline, stats)
