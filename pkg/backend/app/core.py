"""
Automata data model: positive boolean formulas, NBW and ABW, and the concrete
predecessor operator.

States and letters are dense integer indices. Sets of states are handled as
``int`` bitmasks internally (bit ``i`` set means state ``i`` is a member);
the public helpers accept any iterable of state ids as well.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import AutomatonError, Diagnostic, PreconditionError

StateId = int
Letter = int


def mask_of(states: Iterable[StateId]) -> int:
    mask = 0
    for s in states:
        mask |= 1 << s
    return mask


def states_of(mask: int) -> frozenset[StateId]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


# ── positive boolean formulas ────────────────────────────────────────────────


@dataclass(frozen=True)
class Const:
    value: bool

    def holds(self, states: int) -> bool:
        return self.value

    def atoms(self) -> Iterator[StateId]:
        return iter(())

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Atom:
    state: StateId

    def holds(self, states: int) -> bool:
        return bool(states >> self.state & 1)

    def atoms(self) -> Iterator[StateId]:
        yield self.state

    def __str__(self) -> str:
        return str(self.state)


@dataclass(frozen=True)
class And:
    children: Tuple["PosFormula", ...]

    def __post_init__(self):
        if not self.children:
            raise PreconditionError("And needs at least one child")

    def holds(self, states: int) -> bool:
        return all(c.holds(states) for c in self.children)

    def atoms(self) -> Iterator[StateId]:
        for c in self.children:
            yield from c.atoms()

    def __str__(self) -> str:
        return " & ".join(
            f"({c})" if isinstance(c, (And, Or)) else str(c) for c in self.children
        )


@dataclass(frozen=True)
class Or:
    children: Tuple["PosFormula", ...]

    def __post_init__(self):
        if not self.children:
            raise PreconditionError("Or needs at least one child")

    def holds(self, states: int) -> bool:
        return any(c.holds(states) for c in self.children)

    def atoms(self) -> Iterator[StateId]:
        for c in self.children:
            yield from c.atoms()

    def __str__(self) -> str:
        return " | ".join(
            f"({c})" if isinstance(c, Or) else str(c) for c in self.children
        )


PosFormula = Union[Const, Atom, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def conj(children: Iterable[PosFormula]) -> PosFormula:
    """Conjunction; the empty conjunction is ``true``."""
    items = tuple(children)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(children: Iterable[PosFormula]) -> PosFormula:
    """Disjunction; the empty disjunction is ``false``."""
    items = tuple(children)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


def eval_formula(phi: PosFormula, states: Union[int, Iterable[StateId]]) -> bool:
    """``states ⊨ phi`` for a bitmask or an iterable of state ids."""
    mask = states if isinstance(states, int) else mask_of(states)
    return phi.holds(mask)


# ── automata ─────────────────────────────────────────────────────────────────


def _letter_index(alphabet: Sequence[str], letter: Union[int, str]) -> Letter:
    if isinstance(letter, int):
        return letter
    try:
        return alphabet.index(letter)
    except ValueError:
        raise AutomatonError([Diagnostic("unknown letter", letter=letter)])


@dataclass(frozen=True)
class Nbw:
    state_count: int
    alphabet: Tuple[str, ...]
    initial: StateId
    accepting: frozenset
    # delta[letter][state] is the successor set; empty means no transition
    delta: Tuple[Tuple[frozenset, ...], ...]
    names: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    @classmethod
    def build(
        cls,
        state_count: int,
        alphabet: Sequence[str],
        initial: StateId,
        accepting: Iterable[StateId],
        transitions: Iterable[Tuple[StateId, Union[int, str], StateId]] = (),
        names: Optional[Sequence[str]] = None,
    ) -> "Nbw":
        alphabet = tuple(alphabet)
        table = [[set() for _ in range(state_count)] for _ in alphabet]
        for src, letter, dst in transitions:
            a = _letter_index(alphabet, letter)
            if not 0 <= src < state_count or not 0 <= a < len(alphabet):
                raise AutomatonError(
                    [Diagnostic("transition source out of range", state=src)]
                )
            table[a][src].add(dst)
        return cls(
            state_count=state_count,
            alphabet=alphabet,
            initial=initial,
            accepting=frozenset(accepting),
            delta=tuple(tuple(frozenset(t) for t in row) for row in table),
            names=tuple(names) if names is not None else None,
        )

    @property
    def letters(self) -> range:
        return range(len(self.alphabet))

    def successors(self, state: StateId, letter: Letter) -> frozenset:
        return self.delta[letter][state]

    def transitions(self) -> Iterator[Tuple[StateId, Letter, StateId]]:
        for a, row in enumerate(self.delta):
            for src, targets in enumerate(row):
                for dst in sorted(targets):
                    yield src, a, dst

    @cached_property
    def accepting_mask(self) -> int:
        return mask_of(self.accepting)

    @cached_property
    def succ_masks(self) -> Tuple[Tuple[int, ...], ...]:
        # explicit constructions share successor sets between states
        memo: dict[int, int] = {}
        rows = []
        for row in self.delta:
            masks = []
            for targets in row:
                key = id(targets)
                if key not in memo:
                    memo[key] = mask_of(targets)
                masks.append(memo[key])
            rows.append(tuple(masks))
        return tuple(rows)

    @cached_property
    def pred_lists(self) -> Tuple[Tuple[Tuple[StateId, ...], ...], ...]:
        rows = []
        for row in self.delta:
            preds = [[] for _ in range(self.state_count)]
            for src, targets in enumerate(row):
                for dst in targets:
                    preds[dst].append(src)
            rows.append(tuple(tuple(p) for p in preds))
        return tuple(rows)

    def as_abw(self) -> "Abw":
        """The same automaton, δ(ℓ,σ) read as a disjunction (∅ is ``false``)."""
        delta = tuple(
            tuple(disj(Atom(t) for t in sorted(targets)) for targets in row)
            for row in self.delta
        )
        return Abw(
            state_count=self.state_count,
            alphabet=self.alphabet,
            initial=self.initial,
            accepting=self.accepting,
            delta=delta,
            names=self.names,
        )

    def with_alphabet(self, order: Sequence[str]) -> "Nbw":
        """Reindex letters to follow ``order`` (same letter names, any order)."""
        order = tuple(order)
        if sorted(order) != sorted(self.alphabet):
            raise AutomatonError(
                [Diagnostic(f"alphabet mismatch: {order} vs {self.alphabet}")]
            )
        if order == self.alphabet:
            return self
        delta = tuple(self.delta[self.alphabet.index(name)] for name in order)
        return Nbw(
            self.state_count, order, self.initial, self.accepting, delta, self.names
        )

    def with_transitions(
        self, extra: Iterable[Tuple[StateId, Letter, StateId]]
    ) -> "Nbw":
        table = [[set(t) for t in row] for row in self.delta]
        for src, a, dst in extra:
            table[a][src].add(dst)
        delta = tuple(tuple(frozenset(t) for t in row) for row in table)
        return Nbw(
            self.state_count,
            self.alphabet,
            self.initial,
            self.accepting,
            delta,
            self.names,
        )


@dataclass(frozen=True)
class Abw:
    state_count: int
    alphabet: Tuple[str, ...]
    initial: StateId
    accepting: frozenset
    # delta[letter][state] is a positive boolean formula over state ids
    delta: Tuple[Tuple[PosFormula, ...], ...]
    names: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    @classmethod
    def build(
        cls,
        state_count: int,
        alphabet: Sequence[str],
        initial: StateId,
        accepting: Iterable[StateId],
        transitions: Mapping[Tuple[StateId, Union[int, str]], PosFormula],
        names: Optional[Sequence[str]] = None,
    ) -> "Abw":
        alphabet = tuple(alphabet)
        table = [[FALSE] * state_count for _ in alphabet]
        for (src, letter), phi in transitions.items():
            a = _letter_index(alphabet, letter)
            if not 0 <= src < state_count or not 0 <= a < len(alphabet):
                raise AutomatonError(
                    [Diagnostic("transition source out of range", state=src)]
                )
            table[a][src] = phi
        return cls(
            state_count=state_count,
            alphabet=alphabet,
            initial=initial,
            accepting=frozenset(accepting),
            delta=tuple(tuple(row) for row in table),
            names=tuple(names) if names is not None else None,
        )

    @property
    def letters(self) -> range:
        return range(len(self.alphabet))

    @cached_property
    def accepting_mask(self) -> int:
        return mask_of(self.accepting)

    @cached_property
    def _sat_cache(self) -> dict:
        return {}

    def sat_mask(self, letter: Letter, states: int) -> int:
        """Bitmask of the ℓ such that ``states ⊨ δ(ℓ, letter)``."""
        cache = self._sat_cache
        key = (letter, states)
        hit = cache.get(key)
        if hit is not None:
            return hit
        out = 0
        for src, phi in enumerate(self.delta[letter]):
            if phi.holds(states):
                out |= 1 << src
        if len(cache) > 1 << 16:
            cache.clear()
        cache[key] = out
        return out


Automaton = Union[Nbw, Abw]


def pre_nbw(nbw: Nbw, letter: Letter, targets: Iterable[StateId]) -> frozenset:
    """States with a ``letter``-successor in ``targets``."""
    goal = mask_of(targets)
    if not goal:
        return frozenset()
    row = nbw.succ_masks[letter]
    return frozenset(src for src, succ in enumerate(row) if succ & goal)


def validate(automaton: Automaton) -> list[Diagnostic]:
    """Every broken invariant of ``automaton``; an empty list means well-formed."""
    diags: list[Diagnostic] = []
    n = automaton.state_count
    if n < 1:
        diags.append(Diagnostic("automaton needs at least one state"))
    if not automaton.alphabet:
        diags.append(Diagnostic("alphabet is empty"))
    if len(set(automaton.alphabet)) != len(automaton.alphabet):
        diags.append(Diagnostic("duplicate letter in alphabet"))
    if not 0 <= automaton.initial < max(n, 0):
        diags.append(
            Diagnostic("initial state out of range", state=automaton.initial)
        )
    for s in sorted(automaton.accepting):
        if not 0 <= s < n:
            diags.append(Diagnostic("accepting state out of range", state=s))
    if len(automaton.delta) != len(automaton.alphabet):
        diags.append(Diagnostic("transition table does not match the alphabet"))
        return diags
    for a, row in enumerate(automaton.delta):
        name = automaton.alphabet[a]
        if len(row) != n:
            diags.append(Diagnostic("transition row has wrong length", letter=name))
            continue
        for src, entry in enumerate(row):
            targets = entry if isinstance(automaton, Nbw) else set(entry.atoms())
            bad = sorted(t for t in targets if not 0 <= t < n)
            if bad:
                diags.append(
                    Diagnostic(
                        f"transition target {bad[0]} out of range",
                        state=src,
                        letter=name,
                    )
                )
    return diags


def ensure_valid(automaton: Automaton) -> None:
    diags = validate(automaton)
    if diags:
        raise AutomatonError(diags)
