from fastapi.testclient import TestClient

from app.fileformat import parse_text, serialize
from app.main import app

client = TestClient(app)

BAD_LETTER = "type: nbw\nalphabet: a\nstates: 1\ninitial: 0\naccepting: 0\n0 b -> 0\n"


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_universal(total_accepting, only_a_eventually):
    r = client.post("/decide/universal", json={"automaton": serialize(total_accepting)})
    assert r.status_code == 200
    body = r.json()
    assert body["problem"] == "universal"
    assert body["holds"] is True
    assert body["verdict"] == "UNIVERSAL"
    assert body["oracle_agrees"] is None
    assert body["stats"]["outer_rounds"] >= 1

    r = client.post(
        "/decide/universal",
        json={"automaton": serialize(only_a_eventually), "oracle": True},
    )
    assert r.status_code == 200
    assert r.json()["verdict"] == "NOT_UNIVERSAL"
    assert r.json()["oracle_agrees"] is True


def test_empty_accepts_abw_and_nbw(branching_abw, infinitely_many_a):
    r = client.post("/decide/empty", json={"automaton": serialize(branching_abw)})
    assert r.json()["verdict"] == "EMPTY"
    r = client.post(
        "/decide/empty",
        json={"automaton": serialize(infinitely_many_a), "early_stop": False},
    )
    assert r.json()["verdict"] == "NONEMPTY"


def test_include(only_a_eventually, infinitely_many_a):
    r = client.post(
        "/decide/include",
        json={
            "automaton_a": serialize(only_a_eventually),
            "automaton_b": serialize(infinitely_many_a),
            "oracle": True,
        },
    )
    assert r.status_code == 200
    assert r.json()["verdict"] == "INCLUDED"


def test_parse_errors_are_422():
    r = client.post("/decide/universal", json={"automaton": BAD_LETTER})
    assert r.status_code == 422
    (diag,) = r.json()["detail"]
    assert diag["field"] == "automaton"
    assert diag["line"] == 6
    assert "unknown letter" in diag["message"]


def test_universal_rejects_abw(accepting_loop_abw):
    r = client.post(
        "/decide/universal", json={"automaton": serialize(accepting_loop_abw)}
    )
    assert r.status_code == 422


def test_mismatched_alphabets_are_422(total_accepting, accepting_loop_abw):
    one_letter = serialize(accepting_loop_abw).replace("type: abw", "type: nbw")
    r = client.post(
        "/decide/include",
        json={"automaton_a": serialize(total_accepting), "automaton_b": one_letter},
    )
    assert r.status_code == 422


def test_timeout_is_408(total_accepting):
    r = client.post(
        "/decide/universal",
        json={"automaton": serialize(total_accepting), "timeout": 0},
    )
    assert r.status_code == 408


def test_generate():
    r = client.post("/generate", json={"n": 10, "r": "1.5", "f": "0.2", "seed": 42})
    assert r.status_code == 200
    body = r.json()
    assert body["seed"] == 42
    assert body["transitions"] == {"0": 15, "1": 15}
    assert body["accepting"] == 2
    header = body["automaton"].splitlines()[0]
    assert header == "# tabakov-vardi n=10 r=1.5 f=0.2 seed=42"
    assert parse_text(body["automaton"]).state_count == 10

    again = client.post("/generate", json={"n": 10, "r": "1.5", "f": "0.2", "seed": 42})
    assert again.json() == body


def test_generate_rejects_impossible_density():
    r = client.post("/generate", json={"n": 2, "r": "5", "f": "0.5"})
    assert r.status_code == 422
    r = client.post("/generate", json={"n": 0, "r": "1", "f": "0.5"})
    assert r.status_code == 422
