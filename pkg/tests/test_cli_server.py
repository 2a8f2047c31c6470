"""Command line verbs and the serve-mode HTTP endpoints."""

import json

import pytest
from fastapi.testclient import TestClient

from firegraph.cli import main
from firegraph.engine import replay_trace, strategy_from_json
from firegraph.families import graph_from_text
from firegraph.server import create_app


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ----------------------------------------------------------------- cli --


def test_growth_table(capsys):
    code, out, err = run_cli(capsys, "growth", "--family", "orthant:d=3", "--N", "3")
    assert code == 0 and err == ""
    rows = [ln.split() for ln in out.strip().splitlines()]
    assert rows[0] == ["n", "s", "beta"]
    assert [r[1] for r in rows[1:]] == ["1", "3", "6", "10"]


def test_growth_json(capsys):
    code, out, _ = run_cli(capsys, "growth", "--family", "tree:delta=3", "--N", "4", "--json")
    doc = json.loads(out)
    assert doc["s"] == [1, 3, 6, 12, 24]
    assert doc["beta"][-1] == 46


def test_simulate_zero_budget_hits_the_radius_cap(tmp_path, capsys):
    out_file = tmp_path / "sq.trace"
    code, _, _ = run_cli(
        capsys, "simulate", "--family", "square", "--x0", "ball:0",
        "--budget", "0", "--r", "1", "--radius-cap", "8", "--out", str(out_file),
    )
    assert code == 0
    header = json.loads(out_file.read_text().splitlines()[0])
    assert header["outcome"] == "cap-exceeded"
    assert header["x0"] == [[0, 0]]
    # round trip: the file replays to the identical trace
    code, out, _ = run_cli(capsys, "check", str(out_file))
    assert code == 0 and json.loads(out)["ok"] is True


def test_simulate_with_strategy_file(tmp_path, capsys):
    strat_file = tmp_path / "s.json"
    trace_file = tmp_path / "s.trace"
    code, _, _ = run_cli(
        capsys, "synth", "--method", "second-diff", "--family", "square",
        "--n", "1", "--out", str(strat_file),
    )
    assert code == 0
    doc = json.loads(strat_file.read_text())
    assert doc["outcome"] == "contained"
    strat_file.write_text(json.dumps(doc["strategy"]))
    code, _, _ = run_cli(
        capsys, "simulate", "--family", "square", "--x0", "ball:1",
        "--strategy", str(strat_file), "--out", str(trace_file),
    )
    assert code == 0
    header = json.loads(trace_file.read_text().splitlines()[0])
    assert header["outcome"] == "contained"
    tr = replay_trace(trace_file.read_text(), graph_from_text("square"))
    assert tr.burned_total == header["burned_total"]


def test_simulate_rejects_strategy_plus_budget(tmp_path, capsys):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"kind": "strategy", "r": 1,
                             "budget": {"kind": "constant", "c": 1},
                             "key_tag": None, "schedule": [], "provenance": None}))
    code, _, err = run_cli(
        capsys, "simulate", "--family", "square", "--x0", "ball:0",
        "--strategy", str(f), "--budget", "3", "--r", "1",
    )
    assert code == 2
    assert json.loads(err)["code"] == "invalid-argument"


def test_oracle_verb(capsys):
    code, out, _ = run_cli(
        capsys, "oracle", "--family", "lattice:d=1", "--x0", "ball:0",
        "--f", "1", "--R", "3",
    )
    doc = json.loads(out)
    assert doc["verdict"] == "containable" and doc["burned"] == 2
    strategy_from_json(doc["strategy"])


def test_expansion_verb(capsys):
    code, out, _ = run_cli(
        capsys, "expansion", "--family", "hyper37", "--lambda", "2",
        "--levels", "1..3",
    )
    doc = json.loads(out)
    assert doc["all_hold"] is True
    assert [r["level"] for r in doc["reports"]] == [1, 2, 3]
    code, out, _ = run_cli(
        capsys, "expansion", "--family", "square", "--lambda", "3/2",
        "--levels", "3",
    )
    doc = json.loads(out)
    assert doc["all_hold"] is False and len(doc["reports"]) == 1


def test_certify_expansion_and_check(tmp_path, capsys):
    cert_file = tmp_path / "h37.cert"
    code, _, _ = run_cli(
        capsys, "certify", "--kind", "expansion", "--family", "hyper37",
        "--lambda", "2", "--budget", "1", "--levels", "3",
        "--smoke-turns", "3", "--out", str(cert_file),
    )
    assert code == 0
    doc = json.loads(cert_file.read_text())
    assert doc["kind"] == "expansion-impossibility"
    assert doc["margin"] == "6"
    code, out, _ = run_cli(capsys, "check", str(cert_file))
    assert code == 0 and json.loads(out)["ok"] is True
    # tampering flips the check to a nonzero exit
    doc["s_r"] = 9
    cert_file.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "check", str(cert_file))
    assert code == 1 and json.loads(out)["ok"] is False


def test_certify_divergence_and_check(tmp_path, capsys):
    f = tmp_path / "div.json"
    code, _, _ = run_cli(
        capsys, "certify", "--kind", "divergence", "--family", "orthant:d=3",
        "--budget", "1", "--horizon", "6", "--out", str(f),
    )
    assert code == 0
    assert json.loads(f.read_text())["conclusion"] == "impossible"
    code, out, _ = run_cli(capsys, "check", str(f))
    assert code == 0 and json.loads(out)["ok"] is True


def test_certify_lattice_attaches_evidence(tmp_path, capsys):
    f = tmp_path / "lat.json"
    code, _, _ = run_cli(capsys, "certify", "--kind", "lattice",
                         "--d", "3", "--q", "0", "--out", str(f))
    assert code == 0
    doc = json.loads(f.read_text())
    assert doc["verdict"] == "impossible" and doc["boundary"] is True
    assert doc["impossibility"]["conclusion"] == "impossible"
    code, out, _ = run_cli(capsys, "check", str(f))
    assert code == 0 and json.loads(out)["ok"] is True


def test_transfer_verb(tmp_path, capsys):
    trace_file = tmp_path / "tr.trace"
    code, out, _ = run_cli(
        capsys, "transfer", "--pair", "grid-strong", "--q", "0",
        "--trace-out", str(trace_file),
    )
    doc = json.loads(out)
    assert doc["outcome"] == "contained" and doc["target_family"] == "strong"
    code, out, _ = run_cli(capsys, "check", str(trace_file))
    assert code == 0 and json.loads(out)["ok"] is True


def test_unknown_family_is_a_machine_readable_error(capsys):
    code, out, err = run_cli(
        capsys, "simulate", "--family", "nosuch", "--x0", "ball:0",
        "--budget", "1", "--r", "1",
    )
    assert code == 1 and out == ""
    assert json.loads(err)["code"] == "invalid-family"


def test_usage_error_is_json(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--family"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert json.loads(err)["code"] == "usage"


# -------------------------------------------------------------- server --


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def new_session(client, family="square", ball=1, c=2, r=1):
    resp = client.post("/session", json={
        "family": family, "x0": {"ball": ball},
        "budget": {"kind": "constant", "c": c}, "r": r,
    })
    assert resp.status_code == 200, resp.text
    return resp.json()


def test_session_lifecycle(client):
    doc = new_session(client)
    sid, state = doc["id"], doc["state"]
    assert state["turn"] == 0 and state["burned_total"] == 5
    assert state["next_budget"] == 2 and state["stable"] is False
    resp = client.post(f"/session/{sid}/protect", json=[[2, 0], [0, 2]])
    assert resp.status_code == 200
    state = resp.json()
    assert state["turn"] == 1
    assert [2, 0] in state["protected"] and state["burned_total"] == 11
    assert client.get(f"/session/{sid}").json() == state


def test_protect_rejects_burning_vertex(client):
    doc = new_session(client)
    resp = client.post(f"/session/{doc['id']}/protect", json=[[0, 0]])
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "protection-overlap"
    assert body["vertices"] == [[0, 0]]
    # the failed request must not have advanced the game
    assert client.get(f"/session/{doc['id']}").json()["turn"] == 0


def test_protect_rejects_overspend(client):
    doc = new_session(client, c=1)
    resp = client.post(f"/session/{doc['id']}/protect", json=[[3, 0], [0, 3]])
    assert resp.status_code == 400
    assert resp.json()["code"] == "budget-exceeded"


def test_protect_rejects_unknown_vertex(client):
    doc = new_session(client, family="orthant:d=2")
    resp = client.post(f"/session/{doc['id']}/protect", json=[[-1, 5]])
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "unknown-vertex" and body["vertices"] == [[-1, 5]]


def test_undo_restores_the_exact_prior_state(client):
    doc = new_session(client)
    sid = doc["id"]
    before = client.get(f"/session/{sid}").json()
    client.post(f"/session/{sid}/protect", json=[[2, 0]])
    resp = client.post(f"/session/{sid}/undo")
    assert resp.status_code == 200
    assert resp.json() == before
    # undo at turn 0 is refused
    assert client.post(f"/session/{sid}/undo").status_code == 409


def test_replay_after_undo_equals_fresh_replay(client):
    a = new_session(client)
    b = new_session(client)
    client.post(f"/session/{a['id']}/protect", json=[[2, 0], [0, 2]])
    client.post(f"/session/{a['id']}/undo")
    for sid in (a["id"], b["id"]):
        client.post(f"/session/{sid}/protect", json=[[-2, 0], [0, -2]])
        client.post(f"/session/{sid}/protect", json=[[3, 0], [0, 3]])
    ta = client.get(f"/session/{a['id']}/trace").text
    tb = client.get(f"/session/{b['id']}/trace").text
    assert [ln.split("}", 1)[-1] for ln in ta.splitlines()] == \
           [ln.split("}", 1)[-1] for ln in tb.splitlines()]
    sa = client.get(f"/session/{a['id']}").json()
    sb = client.get(f"/session/{b['id']}").json()
    assert sa["burning"] == sb["burning"] and sa["protected"] == sb["protected"]


def test_trace_export_replays(client, tmp_path):
    doc = new_session(client, family="tree:delta=3", ball=0, c=1)
    sid = doc["id"]
    client.post(f"/session/{sid}/protect", json=[[0]])
    client.post(f"/session/{sid}/protect", json=[[1, 0]])
    text = client.get(f"/session/{sid}/trace").text
    header = json.loads(text.splitlines()[0])
    assert header["outcome"] == "open"
    tr = replay_trace(text, graph_from_text("tree:delta=3"))
    assert tr.burned_total == header["burned_total"]
    # a padded protected count is caught on replay
    lines = text.splitlines()
    row = json.loads(lines[1])
    row["burning_count"] += 1
    lines[1] = json.dumps(row)
    from firegraph.errors import ReplayMismatchError
    with pytest.raises(ReplayMismatchError):
        replay_trace("\n".join(lines) + "\n", graph_from_text("tree:delta=3"))


def test_board_window_square(client):
    doc = new_session(client, ball=0)
    body = client.get(f"/session/{doc['id']}/board", params={"margin": 1}).json()
    assert sorted(body["vertices"]) == [[-1, 0], [0, -1], [0, 0], [0, 1], [1, 0]]
    assert "ring_sizes" not in body


def test_board_window_hyper37_carries_ring_sizes(client):
    doc = new_session(client, family="hyper37", ball=0, c=1)
    body = client.get(f"/session/{doc['id']}/board", params={"margin": 2}).json()
    assert body["ring_sizes"]["0"] == 1 and body["ring_sizes"]["1"] == 7
    levels = {v[0] for v in body["vertices"]}
    assert levels == {0, 1, 2}


def test_close_persists_the_trace(client, tmp_path):
    doc = new_session(client)
    sid = doc["id"]
    client.post(f"/session/{sid}/protect", json=[[2, 0]])
    path = tmp_path / "game.trace"
    resp = client.post(f"/session/{sid}/close", json={"save": str(path)})
    assert resp.json()["saved"] == str(path)
    assert json.loads(path.read_text().splitlines()[0])["kind"] == "game-trace"
    assert client.get(f"/session/{sid}").status_code == 404


def test_unknown_session_404(client):
    assert client.get("/session/zzz").status_code == 404
    assert client.post("/session/zzz/undo").status_code == 404


def test_malformed_session_body_is_structured(client):
    resp = client.post("/session", json={"family": "square"})
    assert resp.status_code == 400
    assert resp.json()["code"] == "invalid-argument"
