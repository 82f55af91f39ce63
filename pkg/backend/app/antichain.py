"""
Antichains: the maximal elements of a downward-closed set.

An antichain stands for its closure ↓AC = {e | ∃a ∈ AC: leq(e, a)}. Two
antichains are equal when their closures are, which is decided with
``below`` in both directions, never by comparing elements structurally.
"""
from abc import ABC, abstractmethod
from typing import Callable, Generic, Iterable, Iterator, List, TypeVar

E = TypeVar("E")


class AntichainBase(ABC, Generic[E]):
    """Operations every antichain representation provides.

    ``insert`` mutates in place; ``union`` returns a fresh antichain.
    """

    @abstractmethod
    def __iter__(self) -> Iterator[E]:
        ...

    @abstractmethod
    def __len__(self) -> int:
        ...

    @abstractmethod
    def insert(self, e: E) -> bool:
        """Add ``e`` unless it is dominated; return whether the closure grew."""

    @abstractmethod
    def dominates(self, e: E) -> bool:
        """``e ∈ ↓self``."""

    @abstractmethod
    def copy(self) -> "AntichainBase[E]":
        ...

    @abstractmethod
    def empty_like(self) -> "AntichainBase[E]":
        ...

    def __bool__(self) -> bool:
        return len(self) > 0

    def extend(self, items: Iterable[E]) -> int:
        return sum(1 for e in items if self.insert(e))

    def absorb(self, other: Iterable[E]) -> "AntichainBase[E]":
        """Insert every element of ``other``; return those that were new."""
        fresh = self.empty_like()
        for e in other:
            if self.insert(e):
                fresh.insert(e)
        return fresh

    def union(self, other: "AntichainBase[E]") -> "AntichainBase[E]":
        out = self.copy()
        out.extend(other)
        return out

    def below(self, other: "AntichainBase[E]") -> bool:
        """``↓self ⊆ ↓other``."""
        return all(other.dominates(e) for e in self)

    def same_closure(self, other: "AntichainBase[E]") -> bool:
        return self.below(other) and other.below(self)


class Antichain(AntichainBase[E]):
    """List-backed antichain over any pre-order ``leq(a, b)`` ("a is below b")."""

    def __init__(self, leq: Callable[[E, E], bool], items: Iterable[E] = ()):
        self.leq = leq
        self._items: List[E] = []
        self.extend(items)

    def __iter__(self) -> Iterator[E]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __repr__(self) -> str:
        return f"Antichain({self._items!r})"

    def insert(self, e: E) -> bool:
        leq = self.leq
        for a in self._items:
            if leq(e, a):
                return False
        self._items = [a for a in self._items if not leq(a, e)]
        self._items.append(e)
        return True

    def dominates(self, e: E) -> bool:
        leq = self.leq
        return any(leq(e, a) for a in self._items)

    def copy(self) -> "Antichain[E]":
        out = Antichain(self.leq)
        out._items = list(self._items)
        return out

    def empty_like(self) -> "Antichain[E]":
        return Antichain(self.leq)

    def filter(self, keep: Callable[[E], bool]) -> "Antichain[E]":
        """Sub-antichain of the elements satisfying ``keep``."""
        out = Antichain(self.leq)
        out._items = [a for a in self._items if keep(a)]
        return out


def insert(ac: AntichainBase[E], e: E) -> AntichainBase[E]:
    """Functional insert: ↓result = ↓ac ∪ ↓{e}; ``ac`` is left untouched."""
    out = ac.copy()
    out.insert(e)
    return out


def union(ac1: AntichainBase[E], ac2: AntichainBase[E]) -> AntichainBase[E]:
    return ac1.union(ac2)


def dominates(ac: AntichainBase[E], e: E) -> bool:
    return ac.dominates(e)


def below(ac1: AntichainBase[E], ac2: AntichainBase[E]) -> bool:
    return ac1.below(ac2)
