import random

import pytest

from app.core import FALSE, TRUE, Abw, And, Atom, Nbw, Or
from app.errors import OracleCapExceeded, PreconditionError
from app.oracle import (
    Lasso,
    MhSpace,
    abw_empty_oracle,
    brute_pre,
    classical_empty,
    classical_empty_gen,
    include_oracle,
    kv,
    kvmh,
    member_lasso,
    mh,
    ranked_states,
    scc_empty,
    universal_oracle,
)
from app.randgen import random_abw


def random_nbw(rng, n, accepting, letters=("a", "b"), edges=None):
    count = edges if edges is not None else rng.randint(n, 3 * n)
    transitions = [
        (rng.randrange(n), rng.choice(letters), rng.randrange(n)) for _ in range(count)
    ]
    return Nbw.build(n, letters, 0, accepting, transitions)


def random_lasso(rng, letters):
    u = tuple(rng.randrange(letters) for _ in range(rng.randint(0, 4)))
    v = tuple(rng.randrange(letters) for _ in range(rng.randint(1, 4)))
    return Lasso(u, v)


def lasso_product(nbw: Nbw, word: Lasso) -> Nbw:
    """One-letter NBW whose runs are the runs of ``nbw`` on u·v^ω."""
    n = nbw.state_count
    letters = word.u + word.v
    loop_start = len(word.u)
    transitions = []
    for pos, a in enumerate(letters):
        nxt = pos + 1 if pos + 1 < len(letters) else loop_start
        for src, targets in enumerate(nbw.delta[a]):
            for dst in targets:
                transitions.append((pos * n + src, "x", nxt * n + dst))
    accepting = [
        pos * n + s for pos in range(loop_start, len(letters)) for s in nbw.accepting
    ]
    return Nbw.build(n * len(letters), ("x",), nbw.initial, accepting, transitions)


def test_kv_transition_shape():
    nbw = Nbw.build(3, ("a",), 0, [], [(0, "a", 1), (0, "a", 2)])
    abw = kv(nbw, 2)
    assert abw.state_count == 9
    assert abw.initial == 2
    assert abw.names[5] == "1:2"
    expected = And(
        (Or((Atom(5), Atom(4), Atom(3))), Or((Atom(8), Atom(7), Atom(6))))
    )
    assert abw.delta[0][2] == expected
    # no successors: the empty conjunction
    assert abw.delta[0][1 * 3 + 0] == TRUE
    assert abw.accepting == frozenset({1, 4, 7})


def test_kv_odd_rank_on_accepting_is_false():
    nbw = Nbw.build(2, ("a",), 0, [0], [(0, "a", 1)])
    abw = kv(nbw, 2)
    assert abw.delta[0][1] == FALSE


def test_kv_rejects_odd_bound():
    nbw = Nbw.build(1, ("a",), 0, [])
    with pytest.raises(PreconditionError):
        kv(nbw, 1)


def test_ranked_states_skip_odd_accepting():
    nbw = Nbw.build(2, ("a",), 0, [1])
    assert ranked_states(nbw, 2) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 2)]


def test_mh_accepting_loop(accepting_loop_abw):
    reachable = mh(accepting_loop_abw)
    assert reachable.state_count == 1
    assert not classical_empty(reachable)
    full = mh(accepting_loop_abw, reachable=False)
    assert full.state_count == 3


def test_mh_dead_automaton_has_no_initial_successors():
    abw = Abw.build(2, ("a", "b"), 0, [1], {})
    explicit = mh(abw)
    assert all(not explicit.successors(explicit.initial, a) for a in explicit.letters)
    assert classical_empty(explicit)


def test_mh_preserves_nbw_language():
    rng = random.Random(1)
    for _ in range(30):
        n = rng.randint(1, 5)
        nbw = random_nbw(rng, n, [s for s in range(n) if rng.random() < 0.4])
        assert abw_empty_oracle(nbw.as_abw()) is classical_empty(nbw)


def test_kvmh_of_total_accepting_state(total_accepting):
    comp = kvmh(total_accepting)
    assert comp.nbw.state_count == 2
    assert classical_empty(comp.nbw)
    assert universal_oracle(total_accepting)


def test_classical_empty_examples():
    assert not classical_empty(Nbw.build(1, ("a",), 0, [0], [(0, "a", 0)]))
    assert classical_empty(Nbw.build(2, ("a",), 0, [], [(0, "a", 1), (1, "a", 0)]))


def test_classical_empty_matches_scc_check():
    rng = random.Random(2)
    for _ in range(100):
        n = rng.randint(1, 50)
        nbw = random_nbw(rng, n, rng.sample(range(n), rng.randint(0, min(n, 3))))
        assert classical_empty(nbw) is scc_empty(nbw)


def test_classical_empty_gen_examples():
    loop = Nbw.build(2, ("a",), 0, [], [(0, "a", 1), (1, "a", 0)])
    assert classical_empty_gen(loop, [0], [])
    assert not classical_empty_gen(loop, [0], [1])
    assert classical_empty_gen(loop, [0, 1], [0, 1]) is classical_empty(
        Nbw.build(2, ("a",), 0, [0, 1], [(0, "a", 1), (1, "a", 0)])
    )


def test_lasso_needs_a_loop():
    with pytest.raises(PreconditionError):
        Lasso((0,), ())


def test_member_lasso_examples(total_accepting, infinitely_many_a):
    rng = random.Random(3)
    no_accepting = Nbw.build(1, ("a", "b"), 0, [], [(0, "a", 0), (0, "b", 0)])
    for _ in range(20):
        word = random_lasso(rng, 2)
        assert member_lasso(total_accepting, word)
        assert not member_lasso(no_accepting, word)
    assert member_lasso(infinitely_many_a, Lasso((1, 1), (1, 0)))
    assert not member_lasso(infinitely_many_a, Lasso((0, 0), (1,)))


def test_member_lasso_matches_graph_search():
    rng = random.Random(4)
    for _ in range(80):
        n = rng.randint(1, 6)
        nbw = random_nbw(rng, n, rng.sample(range(n), rng.randint(0, n)))
        word = random_lasso(rng, 2)
        assert member_lasso(nbw, word) is not scc_empty(lasso_product(nbw, word))


@pytest.mark.parametrize("seed", range(15))
def test_kvmh_complements(seed):
    rng = random.Random(seed)
    if seed % 2:
        n = rng.randint(1, 4)
        nbw = random_nbw(rng, n, range(n))
    else:
        nbw = random_nbw(rng, 2, [rng.randrange(2)])
    comp = kvmh(nbw).nbw
    for _ in range(20):
        word = random_lasso(rng, 2)
        assert member_lasso(nbw, word) != member_lasso(comp, word)


def test_kvmh_grows_with_rank_bound():
    rng = random.Random(6)
    for _ in range(8):
        nbw = random_nbw(rng, 2, [rng.randrange(2)])
        low, high = kvmh(nbw, 0).nbw, kvmh(nbw, 2).nbw
        for _ in range(15):
            word = random_lasso(rng, 2)
            if member_lasso(low, word):
                assert member_lasso(high, word)


def test_composed_oracles(total_accepting, only_a_eventually, infinitely_many_a):
    assert universal_oracle(total_accepting)
    assert not universal_oracle(only_a_eventually)
    assert include_oracle(only_a_eventually, infinitely_many_a)
    assert not include_oracle(infinitely_many_a, only_a_eventually)
    rng = random.Random(7)
    for _ in range(10):
        nbw = random_nbw(rng, 2, [rng.randrange(2)])
        assert include_oracle(nbw, nbw)


def test_abw_empty_oracle_examples(accepting_loop_abw, branching_abw):
    assert not abw_empty_oracle(accepting_loop_abw)
    assert abw_empty_oracle(branching_abw)


def test_cap_is_enforced(settings_env):
    settings_env(oracle_cap=30)
    assert MhSpace(random_abw(3, 0)).size == 27
    with pytest.raises(OracleCapExceeded) as info:
        MhSpace(random_abw(4, 0))
    assert info.value.cap == 30
    assert info.value.size == 81
    with pytest.raises(OracleCapExceeded):
        mh(random_abw(4, 0), reachable=False)


def test_full_enumeration_counts_every_state(settings_env):
    abw = random_abw(3, 1)
    assert mh(abw, reachable=False).state_count == 27
    settings_env(oracle_cap=26)
    with pytest.raises(OracleCapExceeded):
        mh(abw, reachable=False)


def test_brute_pre_is_capped(settings_env):
    space = MhSpace(random_abw(3, 2))
    settings_env(oracle_cap=20)
    with pytest.raises(OracleCapExceeded) as info:
        brute_pre(space, 0, lambda st: True)
    assert info.value.size == 27
