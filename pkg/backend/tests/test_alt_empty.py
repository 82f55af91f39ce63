import random

import pytest

from app.alt_empty import AltDomain, MhPair, abw_empty, intersect_alt, leq_alt, pre_alt
from app.core import FALSE, Abw, Atom, Nbw
from app.errors import PreconditionError
from app.fixpoint import FixpointStats
from app.oracle import MhSpace, abw_empty_oracle, brute_pre
from app.randgen import random_abw


def random_pair(rng, n):
    s = rng.randrange(1 << n)
    o = s & rng.randrange(1 << n)
    return MhPair(s, o)


def closure(space, pairs):
    return frozenset(st for st in space.states() if space.in_closure(st, pairs))


def test_leq_alt_examples():
    assert leq_alt(MhPair.of({0}, ()), MhPair.of({0, 1}, ()))
    assert not leq_alt(MhPair.of({0}, ()), MhPair.of({0, 1}, {1}))
    assert leq_alt(MhPair.of({0}, {0}), MhPair.of({0}, {0}))


def test_intersect_alt_examples():
    p = MhPair.of({0, 1}, {0})
    assert intersect_alt(p, p) == p
    assert intersect_alt(p, MhPair.of({0, 1}, {1})) is None
    assert intersect_alt(MhPair.of({0}, ()), MhPair.of({0}, {0})) is None
    assert intersect_alt(MhPair.of({0, 1}, ()), MhPair.of({1, 2}, ())) == MhPair.of(
        {1}, ()
    )


def test_intersect_alt_matches_closures():
    rng = random.Random(2)
    abw = random_abw(4, 0)
    space = MhSpace(abw)
    for _ in range(60):
        p, q = random_pair(rng, 4), random_pair(rng, 4)
        met = intersect_alt(p, q)
        expected = closure(space, [p]) & closure(space, [q])
        assert closure(space, [met] if met else []) == expected


def test_pre_alt_accepting_loop(accepting_loop_abw):
    out = pre_alt(accepting_loop_abw, 0, MhPair.of({0}, ()))
    assert set(out) == {MhPair.of({0}, ()), MhPair.of({0}, {0})}


def test_pre_alt_owing_inside_alpha_has_no_predecessor(accepting_loop_abw):
    pair = MhPair.of({0}, {0})
    assert pre_alt(accepting_loop_abw, 0, pair) == []
    space = MhSpace(accepting_loop_abw)
    assert brute_pre(space, 0, lambda t: space.in_closure(t, [pair])) == frozenset()


def test_pre_alt_false_transitions():
    abw = Abw.build(2, ("a",), 0, [1], {(0, "a"): FALSE, (1, "a"): FALSE})
    assert pre_alt(abw, 0, MhPair.of({0, 1}, ())) == [MhPair(0, 0)]


def test_pre_alt_rejects_owing_outside_level():
    abw = random_abw(3, 1)
    with pytest.raises(PreconditionError):
        pre_alt(abw, 0, MhPair(0b001, 0b010))


@pytest.mark.parametrize("seed", range(12))
def test_pre_alt_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    abw = random_abw(n, seed, true_pct=10, false_pct=10)
    space = MhSpace(abw)
    for _ in range(6):
        pair = random_pair(rng, n)
        for letter in abw.letters:
            out = pre_alt(abw, letter, pair)
            expected = brute_pre(space, letter, lambda t: space.in_closure(t, [pair]))
            assert closure(space, out) == expected


@pytest.mark.parametrize("seed", range(6))
def test_mh_order_is_a_simulation(seed):
    abw = random_abw(2 + seed % 2, seed, true_pct=10, false_pct=10)
    space = MhSpace(abw)
    states = list(space.states())
    for low in states:
        for high in states:
            if not leq_alt(MhPair(*low), MhPair(*high)):
                continue
            # accepting states (o = ∅) are closed downwards
            if not high[1]:
                assert not low[1]
            for letter in abw.letters:
                ours = space.successors(low, letter)
                for target in space.successors(high, letter):
                    assert any(
                        leq_alt(MhPair(*t), MhPair(*target)) for t in ours
                    ), (space.label(low), space.label(high), letter)


def test_abw_empty_examples(accepting_loop_abw, branching_abw, disjunctive_abw):
    assert abw_empty(accepting_loop_abw) is False
    dead = Abw.build(1, ("a",), 0, [0], {(0, "a"): FALSE})
    assert abw_empty(dead) is True
    assert abw_empty(branching_abw) is True
    assert abw_empty(disjunctive_abw) is False


def test_abw_empty_on_nbw_view(only_a_eventually):
    assert abw_empty(only_a_eventually.as_abw()) is False
    no_accepting = Nbw.build(
        2, ("a", "b"), 0, [], [(0, "a", 0), (0, "a", 1), (1, "a", 1)]
    )
    assert abw_empty(no_accepting.as_abw()) is True


def test_meet_alpha_keeps_zero_owing_pairs():
    domain = AltDomain(random_abw(3, 4))
    ac = domain.top()
    assert [p.o for p in domain.meet_alpha(ac)] == [0]


def test_stats_and_early_stop_agree(branching_abw):
    eager, lazy = FixpointStats(), FixpointStats()
    assert abw_empty(branching_abw, stats=eager)
    assert abw_empty(branching_abw, early_stop=False, stats=lazy)
    assert eager.outer_rounds <= lazy.outer_rounds


def test_atom_loop_without_acceptance_is_empty():
    abw = Abw.build(1, ("a",), 0, [], {(0, "a"): Atom(0)})
    assert abw_empty(abw)


@pytest.mark.parametrize("seed", range(40))
def test_abw_empty_agrees_with_oracle(seed):
    n = 1 + seed % 5
    abw = random_abw(n, seed, true_pct=8, false_pct=8)
    expected = abw_empty_oracle(abw)
    assert abw_empty(abw) is expected
    assert abw_empty(abw, early_stop=False) is expected
