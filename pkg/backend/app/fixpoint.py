"""
Büchi and generalized Büchi emptiness fixed points over antichain domains.

    F  = νy · μx · (Pre(x) ∪ (Pre(y) ∩ α))
    F' = νy · (μx₁ · [Pre(x₁) ∪ (Pre(y) ∩ β₁)]
              ∩ μx₂ · [Pre(x₂) ∪ (Pre(y) ∩ β₂)])

A domain supplies the antichain operators; the engines only iterate. The
inner least fixed points are evaluated semi-naively: each iteration applies
``pre`` to the elements added by the previous one, which yields the same
chain of closures as re-applying ``pre`` to the whole approximation.
"""
import logging
import time
from dataclasses import dataclass
from typing import Optional, Protocol

from .antichain import AntichainBase
from .errors import SolverTimeout

logger = logging.getLogger(__name__)


class Deadline:
    """Cooperative timeout, polled by the fixed-point loops."""

    def __init__(self, expires_at: Optional[float] = None):
        self.expires_at = expires_at

    @classmethod
    def after(cls, seconds: Optional[float]) -> "Deadline":
        if seconds is None:
            return cls(None)
        return cls(time.monotonic() + seconds)

    def expired(self) -> bool:
        return self.expires_at is not None and time.monotonic() >= self.expires_at

    def check(self) -> None:
        if self.expired():
            raise SolverTimeout("deadline expired during fixed-point evaluation")


NEVER = Deadline(None)


@dataclass
class FixpointStats:
    outer_rounds: int = 0
    inner_iterations: int = 0
    max_antichain: int = 0

    def observe(self, ac: AntichainBase) -> None:
        self.max_antichain = max(self.max_antichain, len(ac))


class BuchiDomain(Protocol):
    def top(self) -> AntichainBase:
        ...

    def pre(self, ac: AntichainBase) -> AntichainBase:
        ...

    def meet_alpha(self, ac: AntichainBase) -> AntichainBase:
        ...

    def contains_initial(self, ac: AntichainBase) -> bool:
        ...


class GenBuchiDomain(Protocol):
    def top(self) -> AntichainBase:
        ...

    def pre(self, ac: AntichainBase) -> AntichainBase:
        ...

    def meet_beta1(self, ac: AntichainBase) -> AntichainBase:
        ...

    def meet_beta2(self, ac: AntichainBase) -> AntichainBase:
        ...

    def meet(self, ac1: AntichainBase, ac2: AntichainBase) -> AntichainBase:
        ...

    def contains_initial(self, ac: AntichainBase) -> bool:
        ...


def least_fixpoint(
    domain: BuchiDomain,
    seed: AntichainBase,
    deadline: Deadline = NEVER,
    stats: Optional[FixpointStats] = None,
) -> AntichainBase:
    """μx · (pre(x) ∪ seed)."""
    x = seed.copy()
    frontier = seed
    steps = 0
    while frontier:
        deadline.check()
        steps += 1
        if stats is not None:
            stats.inner_iterations += 1
        frontier = x.absorb(domain.pre(frontier))
    logger.debug("inner fixed point: |x|=%d after %d steps", len(x), steps)
    return x


def buchi_fix(
    domain: BuchiDomain,
    early_stop: bool = True,
    deadline: Deadline = NEVER,
    stats: Optional[FixpointStats] = None,
) -> bool:
    """Whether the initial state lies in F (i.e. the language is non-empty)."""
    stats = stats if stats is not None else FixpointStats()
    y = domain.top()
    while True:
        deadline.check()
        stats.outer_rounds += 1
        seed = domain.meet_alpha(domain.pre(y))
        y_next = least_fixpoint(domain, seed, deadline, stats)
        stats.observe(y_next)
        holds = domain.contains_initial(y_next)
        logger.debug(
            "outer round %d: |y|=%d initial=%s", stats.outer_rounds, len(y_next), holds
        )
        if early_stop and not holds:
            return False
        if y.below(y_next):
            return holds
        y = y_next


def gen_buchi_fix(
    domain: GenBuchiDomain,
    early_stop: bool = True,
    deadline: Deadline = NEVER,
    stats: Optional[FixpointStats] = None,
) -> bool:
    """Whether the initial state lies in F' for the condition {β₁, β₂}."""
    stats = stats if stats is not None else FixpointStats()
    y = domain.top()
    while True:
        deadline.check()
        stats.outer_rounds += 1
        pre_y = domain.pre(y)
        x1 = least_fixpoint(domain, domain.meet_beta1(pre_y), deadline, stats)
        x2 = least_fixpoint(domain, domain.meet_beta2(pre_y), deadline, stats)
        y_next = domain.meet(x1, x2)
        stats.observe(y_next)
        holds = domain.contains_initial(y_next)
        logger.debug(
            "outer round %d: |x1|=%d |x2|=%d |y|=%d initial=%s",
            stats.outer_rounds,
            len(x1),
            len(x2),
            len(y_next),
            holds,
        )
        if early_stop and not holds:
            return False
        if y.below(y_next):
            return holds
        y = y_next
