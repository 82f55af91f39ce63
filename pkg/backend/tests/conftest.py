import os
import sys

import pytest

# Make the `app` package importable when pytest is launched from the repo root
# or from inside the backend container
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

os.environ.setdefault("ANTICHAIN_CHECK_INVARIANTS", "1")

from app.config import get_settings  # noqa: E402
from app.core import TRUE, Abw, Atom, Nbw, conj, disj  # noqa: E402

get_settings.cache_clear()


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def settings_env(monkeypatch):
    """Set ANTICHAIN_* variables for one test."""

    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(f"ANTICHAIN_{key.upper()}", str(value))
        get_settings.cache_clear()
        return get_settings()

    return apply


@pytest.fixture
def total_accepting():
    """One accepting state looping on every letter: universal."""
    return Nbw.build(1, ("a", "b"), 0, [0], [(0, "a", 0), (0, "b", 0)])


@pytest.fixture
def only_a_eventually():
    """Words with finitely many b's: Σ*·a^ω. Not universal."""
    return Nbw.build(
        2,
        ("a", "b"),
        0,
        [1],
        [(0, "a", 0), (0, "b", 0), (0, "a", 1), (1, "a", 1)],
    )


@pytest.fixture
def infinitely_many_a():
    """(b*a)^ω, deterministic. Not universal, contains Σ*·a^ω."""
    return Nbw.build(
        2,
        ("a", "b"),
        0,
        [1],
        [(0, "a", 1), (0, "b", 0), (1, "a", 1), (1, "b", 0)],
    )


@pytest.fixture
def accepting_loop_abw():
    return Abw.build(1, ("a",), 0, [0], {(0, "a"): Atom(0)})


@pytest.fixture
def branching_abw():
    """Universal branching into a state that must eventually stop: empty."""
    return Abw.build(
        2,
        ("a",),
        0,
        [0],
        {
            (0, "a"): conj([Atom(0), Atom(1)]),
            (1, "a"): Atom(1),
        },
    )


@pytest.fixture
def disjunctive_abw():
    """Choice between looping in 0 and moving to an accepting sink: nonempty."""
    return Abw.build(
        3,
        ("a", "b"),
        0,
        [2],
        {
            (0, "a"): disj([Atom(0), Atom(2)]),
            (0, "b"): Atom(1),
            (1, "a"): Atom(1),
            (1, "b"): Atom(1),
            (2, "a"): TRUE,
            (2, "b"): Atom(2),
        },
    )
