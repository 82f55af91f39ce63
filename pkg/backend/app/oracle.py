"""
Explicit reference constructions for cross-checking the antichain solvers.

Everything here enumerates state spaces outright, so every construction is
guarded by ``Settings.oracle_cap``. Useful envelope for the full KVMH
complement: n ≤ 3 with |α| ≥ 2, or α = Loc with n ≤ 5.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Tuple

import networkx as nx

from .alt_empty import MhPair, leq_alt
from .config import get_settings
from .core import (
    Abw,
    Atom,
    FALSE,
    Letter,
    Nbw,
    StateId,
    conj,
    disj,
    ensure_valid,
    mask_of,
)
from .errors import OracleCapExceeded, PreconditionError
from .univ import RankPair

logger = logging.getLogger(__name__)

RankedState = Tuple[StateId, int]
ExplicitState = Tuple[int, int]


@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word u·v^ω."""

    u: Tuple[Letter, ...]
    v: Tuple[Letter, ...]

    def __post_init__(self):
        if not self.v:
            raise PreconditionError("lasso loop must be non-empty")


def _check_cap(what: str, size: int) -> None:
    cap = get_settings().oracle_cap
    if size > cap:
        raise OracleCapExceeded(what, size, cap)


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if not sub:
            return
        sub = (sub - 1) & mask


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _fmt(mask: int, labels) -> str:
    return "{" + ",".join(str(labels[i]) for i in _bits(mask)) + "}"


# ── KV and MH ────────────────────────────────────────────────────────────────


def ranked_states(nbw: Nbw, k: int) -> List[RankedState]:
    """Loc × [k] without the odd-ranked accepting pairs."""
    return [
        (loc, i)
        for loc in range(nbw.state_count)
        for i in range(k + 1)
        if not (loc in nbw.accepting and i % 2)
    ]


def _check_rank_bound(k: int) -> None:
    if k < 0 or k % 2:
        raise PreconditionError(f"rank bound must be even and non-negative, got {k}")


def kv(nbw: Nbw, k: int) -> Abw:
    """The explicit KV(nbw, k) ABW; state (ℓ, i) has index ℓ·(k+1) + i."""
    _check_rank_bound(k)
    width = k + 1

    def idx(loc: StateId, i: int) -> StateId:
        return loc * width + i

    delta = []
    for row in nbw.delta:
        out_row = []
        for loc in range(nbw.state_count):
            targets = row[loc]
            for i in range(width):
                if loc in nbw.accepting and i % 2:
                    out_row.append(FALSE)
                    continue
                out_row.append(
                    conj(
                        disj(Atom(idx(t, j)) for j in range(i, -1, -1))
                        for t in sorted(targets)
                    )
                )
        delta.append(tuple(out_row))
    return Abw(
        state_count=nbw.state_count * width,
        alphabet=nbw.alphabet,
        initial=idx(nbw.initial, k),
        accepting=frozenset(
            idx(loc, i) for loc in range(nbw.state_count) for i in range(1, width, 2)
        ),
        delta=tuple(delta),
        names=tuple(
            f"{loc}:{i}" for loc in range(nbw.state_count) for i in range(width)
        ),
    )


class MhSpace:
    """MH(abw) over every ⟨s, o⟩ with o ⊆ s, successors computed on demand."""

    def __init__(self, abw: Abw):
        n = abw.state_count
        self.size = 3**n
        _check_cap("MH state space", self.size)
        self.abw = abw
        self.n = n
        self.alpha = abw.accepting_mask
        self.sat = [
            [abw.sat_mask(a, x) for x in range(1 << n)] for a in abw.letters
        ]
        self._memo: Dict[Tuple, Tuple[ExplicitState, ...]] = {}

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return self.abw.alphabet

    @property
    def initial(self) -> ExplicitState:
        return (1 << self.abw.initial, 0)

    def states(self) -> Iterator[ExplicitState]:
        for s in range(1 << self.n):
            for o in _submasks(s):
                yield (s, o)

    def successors(
        self, state: ExplicitState, letter: Letter
    ) -> Tuple[ExplicitState, ...]:
        key = (state, letter)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        s, o = state
        sat = self.sat[letter]
        out = []
        for s1 in range(1 << self.n):
            if s & ~sat[s1]:
                continue
            if not o:
                out.append((s1, s1 & ~self.alpha))
                continue
            for o1 in _submasks(s1):
                if not o & ~sat[o1]:
                    out.append((s1, o1 & ~self.alpha))
        hit = self._memo[key] = tuple(dict.fromkeys(out))
        return hit

    def in_closure(self, state: ExplicitState, pairs: Iterable[MhPair]) -> bool:
        here = MhPair(*state)
        return any(leq_alt(here, p) for p in pairs)

    def label(self, state: ExplicitState) -> str:
        return f"{_fmt(state[0], range(self.n))}/{_fmt(state[1], range(self.n))}"


class KvmhSpace:
    """KVMH(nbw, k) over every ⟨s, o⟩ with o ⊆ s (sets of ranked states)."""

    def __init__(self, nbw: Nbw, k: Optional[int] = None):
        if k is None:
            k = 2 * (nbw.state_count - len(nbw.accepting))
        _check_rank_bound(k)
        self.nbw = nbw
        self.k = k
        self.top = k + 1
        self.pairs = ranked_states(nbw, k)
        p = len(self.pairs)
        self.size = 3**p
        _check_cap("KVMH state space", self.size)
        self.odd = mask_of(j for j, (_, i) in enumerate(self.pairs) if i % 2)
        self.chars = [self._char(m) for m in range(1 << p)]
        self._memo: Dict[Tuple, Tuple[ExplicitState, ...]] = {}

    def _char(self, mask: int) -> Tuple[int, ...]:
        f = [self.top] * self.nbw.state_count
        for j in _bits(mask):
            loc, i = self.pairs[j]
            f[loc] = min(f[loc], i)
        return tuple(f)

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return self.nbw.alphabet

    @property
    def initial(self) -> ExplicitState:
        return (1 << self.pairs.index((self.nbw.initial, self.k)), 0)

    def states(self) -> Iterator[ExplicitState]:
        for s in range(1 << len(self.pairs)):
            for o in _submasks(s):
                yield (s, o)

    def _bounds(self, mask: int, letter: Letter) -> Tuple[int, ...]:
        # b[ℓ'] = least rank any ℓ' successor must be matched with
        b = [self.top] * self.nbw.state_count
        row = self.nbw.delta[letter]
        for j in _bits(mask):
            loc, i = self.pairs[j]
            for t in row[loc]:
                if i < b[t]:
                    b[t] = i
        return tuple(b)

    def successors(
        self, state: ExplicitState, letter: Letter
    ) -> Tuple[ExplicitState, ...]:
        s, o = state
        bs = self._bounds(s, letter)
        bo = self._bounds(o, letter) if o else None
        key = (letter, bs, bo)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        chars, odd = self.chars, self.odd
        out = []
        for s1 in range(1 << len(self.pairs)):
            if any(x > y for x, y in zip(chars[s1], bs)):
                continue
            if bo is None:
                out.append((s1, s1 & ~odd))
                continue
            s1_odd = s1 & odd
            # o' = t ∪ (s' ∩ odd) is the best witness for the target ⟨s', t⟩
            for t in _submasks(s1 & ~odd):
                if all(x <= y for x, y in zip(chars[t | s1_odd], bo)):
                    out.append((s1, t))
        hit = self._memo[key] = tuple(out)
        return hit

    def in_closure(self, state: ExplicitState, pairs: Iterable[RankPair]) -> bool:
        fs, fo = self.chars[state[0]], self.chars[state[1]]
        o_empty = state[1] == 0
        for rp in pairs:
            if rp.o_empty != o_empty:
                continue
            if all(x >= int(y) for x, y in zip(fs, rp.fs)) and all(
                x >= int(y) for x, y in zip(fo, rp.fo)
            ):
                return True
        return False

    def label(self, state: ExplicitState) -> str:
        names = [f"({loc},{i})" for loc, i in self.pairs]
        return f"{_fmt(state[0], names)}/{_fmt(state[1], names)}"


@dataclass
class ExplicitNbw:
    """An explicit construction and the (s, o) pair behind every state index."""

    nbw: Nbw
    table: List[ExplicitState]


def _explore(space, what: str, reachable: bool) -> ExplicitNbw:
    """Turn an on-demand space into an Nbw; accepting states are the o = ∅ ones."""
    letters = range(len(space.alphabet))
    if reachable:
        table = [space.initial]
        index = {space.initial: 0}
        queue = deque([space.initial])
        while queue:
            state = queue.popleft()
            for a in letters:
                for t in space.successors(state, a):
                    if t not in index:
                        index[t] = len(table)
                        table.append(t)
                        _check_cap(what, len(table))
                        queue.append(t)
    else:
        _check_cap(what, space.size)
        table = list(space.states())
        index = {st: i for i, st in enumerate(table)}

    shared: Dict[int, frozenset] = {}
    delta = []
    for a in letters:
        row = []
        for state in table:
            succ = space.successors(state, a)
            key = id(succ)
            if key not in shared:
                shared[key] = frozenset(index[t] for t in succ if t in index)
            row.append(shared[key])
        delta.append(tuple(row))
    nbw = Nbw(
        state_count=len(table),
        alphabet=space.alphabet,
        initial=index[space.initial],
        accepting=frozenset(i for i, (_, o) in enumerate(table) if not o),
        delta=tuple(delta),
        names=tuple(space.label(st) for st in table),
    )
    logger.debug("%s: %d explicit states", what, len(table))
    return ExplicitNbw(nbw, table)


def mh(abw: Abw, reachable: bool = True) -> Nbw:
    """Explicit MH(abw), by default restricted to states reachable from ({ι}, ∅)."""
    ensure_valid(abw)
    return _explore(MhSpace(abw), "MH", reachable).nbw


def kvmh(nbw: Nbw, k: Optional[int] = None, reachable: bool = True) -> ExplicitNbw:
    """Explicit KVMH(nbw, k); k defaults to 2(|Loc| − |α|)."""
    ensure_valid(nbw)
    return _explore(KvmhSpace(nbw, k), "KVMH", reachable)


# ── classical fixed points on explicit graphs ────────────────────────────────


def _pred_masks(nbw: Nbw) -> List[int]:
    preds = [0] * nbw.state_count
    for row in nbw.delta:
        for src, targets in enumerate(row):
            for dst in targets:
                preds[dst] |= 1 << src
    return preds


def _pre(preds: List[int], target: int) -> int:
    out = 0
    for d in _bits(target):
        out |= preds[d]
    return out


def _mu(preds: List[int], seed: int) -> int:
    x = frontier = seed
    while frontier:
        frontier = _pre(preds, frontier) & ~x
        x |= frontier
    return x


def buchi_states(preds: List[int], alpha: int, full: int) -> int:
    """νy · μx · (Pre(x) ∪ (Pre(y) ∩ α)) as a bitmask."""
    y = full
    while True:
        x = _mu(preds, _pre(preds, y) & alpha)
        if x == y:
            return y
        y = x


def gen_buchi_states(preds: List[int], beta1: int, beta2: int, full: int) -> int:
    y = full
    while True:
        pre_y = _pre(preds, y)
        x = _mu(preds, pre_y & beta1) & _mu(preds, pre_y & beta2)
        if x == y:
            return y
        y = x


def classical_empty(nbw: Nbw) -> bool:
    """L(nbw) = ∅, by the explicit Büchi fixed point."""
    full = (1 << nbw.state_count) - 1
    fixed = buchi_states(_pred_masks(nbw), nbw.accepting_mask, full)
    return not fixed >> nbw.initial & 1


def classical_empty_gen(
    nbw: Nbw, beta1: Iterable[StateId], beta2: Iterable[StateId]
) -> bool:
    full = (1 << nbw.state_count) - 1
    fixed = gen_buchi_states(_pred_masks(nbw), mask_of(beta1), mask_of(beta2), full)
    return not fixed >> nbw.initial & 1


def scc_empty(nbw: Nbw) -> bool:
    """L(nbw) = ∅, by looking for a reachable accepting cycle."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(nbw.state_count))
    graph.add_edges_from((src, dst) for src, _, dst in nbw.transitions())
    reach = nx.descendants(graph, nbw.initial) | {nbw.initial}
    for comp in nx.strongly_connected_components(graph):
        if not comp & reach or not comp & nbw.accepting:
            continue
        if len(comp) > 1 or any(graph.has_edge(q, q) for q in comp & nbw.accepting):
            return False
    return True


def member_lasso(nbw: Nbw, word: Lasso) -> bool:
    """u·v^ω ∈ L(nbw), via a Büchi fixed point on Loc × phases of v."""
    n, period = nbw.state_count, len(word.v)
    succ = nbw.succ_masks
    reached = 1 << nbw.initial
    for a in word.u:
        reached = _post(succ[a], reached)
    # node (ℓ, i) has index i·n + ℓ
    preds = [0] * (n * period)
    for i, a in enumerate(word.v):
        nxt = (i + 1) % period
        for src, targets in enumerate(nbw.delta[a]):
            for dst in targets:
                preds[nxt * n + dst] |= 1 << (i * n + src)
    alpha = 0
    for i in range(period):
        alpha |= nbw.accepting_mask << (i * n)
    fixed = buchi_states(preds, alpha, (1 << (n * period)) - 1)
    return bool(fixed & reached)


def _post(row: Tuple[int, ...], states: int) -> int:
    out = 0
    for q in _bits(states):
        out |= row[q]
    return out


def brute_pre(
    space, letter: Letter, member: Callable[[Hashable], bool]
) -> frozenset:
    """Every state of ``space`` with a ``letter``-successor satisfying ``member``."""
    _check_cap("brute-force Pre", space.size)
    return frozenset(
        st
        for st in space.states()
        if any(member(t) for t in space.successors(st, letter))
    )


# ── composed oracles ─────────────────────────────────────────────────────────


def universal_oracle(nbw: Nbw) -> bool:
    return classical_empty(kvmh(nbw).nbw)


def abw_empty_oracle(abw: Abw) -> bool:
    return classical_empty(mh(abw))


def include_oracle(a1: Nbw, a2: Nbw) -> bool:
    """L(a1) ⊆ L(a2) on the explicit reachable product a1 × KVMH(a2)."""
    ensure_valid(a1)
    comp = kvmh(a2.with_alphabet(a1.alphabet)).nbw
    start = (a1.initial, comp.initial)
    index = {start: 0}
    table = [start]
    queue = deque([start])
    edges: List[Tuple[int, int]] = []
    while queue:
        l1, q2 = queue.popleft()
        src = index[(l1, q2)]
        for a in a1.letters:
            for t1 in a1.delta[a][l1]:
                for t2 in comp.delta[a][q2]:
                    node = (t1, t2)
                    if node not in index:
                        index[node] = len(table)
                        table.append(node)
                        _check_cap("inclusion product", len(table))
                        queue.append(node)
                    edges.append((src, index[node]))
    preds = [0] * len(table)
    for src, dst in edges:
        preds[dst] |= 1 << src
    beta1 = mask_of(i for i, (l1, _) in enumerate(table) if l1 in a1.accepting)
    beta2 = mask_of(i for i, (_, q2) in enumerate(table) if q2 in comp.accepting)
    fixed = gen_buchi_states(preds, beta1, beta2, (1 << len(table)) - 1)
    return not fixed & 1
